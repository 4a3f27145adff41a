#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blenderlab/map2.hpp"

namespace blenderlab {

// Relative tolerance for domain-membership checks along a word. Inputs that
// sit exactly on a domain boundary (e.g. the corners of B = [-2,2]^2 after
// outward-rounded interval steps) must not be rejected by rounding alone.
inline constexpr double kDomainTol = 1e-9;

// A named inverse branch of the model dynamics: a map restricted to a box.
struct Branch {
    std::string name;
    PlanarMap map;   // expressions in (x, y, a); chart-linear branches are affine
    Box2 domain;
};

// An atlas of branches a word can draw from.
struct BranchSystem {
    std::vector<Branch> branches;

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < branches.size(); ++i)
            if (branches[i].name == name) return static_cast<int>(i);
        throw ConfigError("unknown branch: " + name);
    }
};

// A finite composition word over named branches with repeat counts.
// Factors are stored in application order: factors.front() acts first.
// Pretty-printing shows composition order (last applied leftmost).
struct BranchWord {
    std::vector<std::pair<int, int>> factors;  // (branch index, count >= 1)

    void append(int branch, int count) {
        if (count < 1) throw ConfigError("branch repeat count must be >= 1");
        factors.emplace_back(branch, count);
    }

    int total_length() const {
        int n = 0;
        for (auto& [b, c] : factors) n += c;
        return n;
    }

    std::string str(const BranchSystem& sys) const;
};

inline std::string BranchWord::str(const BranchSystem& sys) const {
    std::string out;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        if (!out.empty()) out += " o ";
        out += sys.branches[it->first].name;
        if (it->second > 1) out += "^" + std::to_string(it->second);
    }
    return out.empty() ? "id" : out;
}

// Word evaluation with per-stage domain checks; wraps an optional diagonal
// affine conjugacy  post o word o pre  (used by the renormalization).
class WordMap final : public Map2 {
  public:
    WordMap(const BranchSystem* sys, BranchWord word, double a = 0.0)
        : sys_(sys), word_(std::move(word)), a_(a) {}

    WordMap(const BranchSystem* sys, BranchWord word, DiagAffine pre, DiagAffine post,
            double a = 0.0)
        : sys_(sys), word_(std::move(word)), pre_(pre), post_(post), conjugated_(true), a_(a) {}

    const BranchWord& word() const { return word_; }
    const BranchSystem& system() const { return *sys_; }

    Vec2 point(Vec2 z) const override;
    JetPair jets(const JetPair& z) const override;
    IJetPair ijets(const IJetPair& z) const override;
    Box2 box(const Box2& b) const override;

  private:
    template <class State>
    State run(State z) const;

    const BranchSystem* sys_;
    BranchWord word_;
    DiagAffine pre_ = DiagAffine::identity();
    DiagAffine post_ = DiagAffine::identity();
    bool conjugated_ = false;
    double a_ = 0.0;

    static bool in_domain(const Box2& dom, const Vec2& z, double tol) {
        return dom.contains(z.x, z.y, tol);
    }
    static bool in_domain(const Box2& dom, const JetPair& z, double tol) {
        return dom.contains(z.first.c[0], z.second.c[0], tol);
    }
    static bool in_domain(const Box2& dom, const IJetPair& z, double tol) {
        return dom.x.contains(z.first.c[0], tol) && dom.y.contains(z.second.c[0], tol);
    }
    static bool in_domain(const Box2& dom, const Box2& z, double tol) {
        return dom.contains(z, tol);
    }

    static std::string partial_str(const Vec2& z) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "(%.17g, %.17g)", z.x, z.y);
        return std::string(buf);
    }
    static std::string partial_str(const JetPair& z) {
        return partial_str(Vec2{z.first.c[0], z.second.c[0]});
    }
    static std::string partial_str(const IJetPair& z) {
        return Box2{z.first.c[0], z.second.c[0]}.str();
    }
    static std::string partial_str(const Box2& z) { return z.str(); }

    static Vec2 apply_branch(const Branch& b, const Vec2& z, double a) {
        return b.map.eval_point(z, a);
    }
    static JetPair apply_branch(const Branch& b, const JetPair& z, double a) {
        JetD ja = JetD::constant(z.first.L, a);
        auto [jx, jy] = b.map.eval(z.first, z.second, ja);
        return {jx, jy};
    }
    static IJetPair apply_branch(const Branch& b, const IJetPair& z, double a) {
        JetI ja = JetI::constant(z.first.L, Interval::point(a));
        auto [jx, jy] = b.map.eval(z.first, z.second, ja);
        return {jx, jy};
    }
    static Box2 apply_branch(const Branch& b, const Box2& z, double a) {
        return b.map.eval_box(z, a);
    }

    static Vec2 apply_affine(const DiagAffine& m, const Vec2& z) { return m.apply(z); }
    static JetPair apply_affine(const DiagAffine& m, const JetPair& z) { return m.apply(z); }
    static IJetPair apply_affine(const DiagAffine& m, const IJetPair& z) { return m.apply(z); }
    static Box2 apply_affine(const DiagAffine& m, const Box2& z) { return m.apply(z); }
};

template <class State>
State WordMap::run(State z) const {
    if (conjugated_) z = apply_affine(pre_, z);
    int stage = 0;
    for (const auto& [bi, count] : word_.factors) {
        const Branch& br = sys_->branches[bi];
        const double tol = kDomainTol * std::max({1.0, br.domain.x.mag(), br.domain.y.mag()});
        for (int rep = 0; rep < count; ++rep, ++stage) {
            if (!in_domain(br.domain, z, tol)) {
                throw DomainError(br.name + "[" + std::to_string(rep + 1) + "/" +
                                      std::to_string(count) + "]",
                                  "word evaluation left domain of branch '" + br.name +
                                      "' at stage " + std::to_string(stage) + ", state " +
                                      partial_str(z) + ", domain " + br.domain.str());
            }
            z = apply_branch(br, z, a_);
        }
    }
    if (conjugated_) z = apply_affine(post_, z);
    return z;
}

inline Vec2 WordMap::point(Vec2 z) const { return run(z); }
inline JetPair WordMap::jets(const JetPair& z) const { return run(z); }
inline IJetPair WordMap::ijets(const IJetPair& z) const { return run(z); }
inline Box2 WordMap::box(const Box2& b) const { return run(b); }

}  // namespace blenderlab
