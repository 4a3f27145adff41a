#pragma once

#include <string>

#include "blenderlab/blender.hpp"
#include "blenderlab/chains.hpp"
#include "blenderlab/hetero_model.hpp"
#include "blenderlab/newhouse.hpp"
#include "blenderlab/renorm.hpp"

namespace blenderlab {

// Model configuration document: eigenvalues{sigma, lambda, sigma_u, sigma_uu},
// transitions{T_S, T_Q?, T_H?} as monomial tables ("1", "x", "y^2", "x*y",
// "a", ...), constants{s_x, s_y, q_x, q_y, h}, optional box overrides.
// serialize(parse(doc)) reproduces every numeric field bit-exactly.
HeteroModelConfig parse_model_config(const std::string& json_text);
std::string serialize_model_config(const HeteroModelConfig& config);

ChainModel parse_chain_model(const std::string& json_text);
std::string serialize_chain_model(const ChainModel& chain);

std::string serialize_plan(const RenormPlan& plan);
RenormPlan parse_plan(const std::string& json_text);

std::string serialize_covering(const Covering1D& cert);
std::string serialize_covering2d(const Covering2D& cert);
std::string serialize_jet_covering(const JetCoveringCertificate& cert);
std::string serialize_cr_report(const CrDistanceReport& rep);
std::string serialize_cone(const ConeCertificate& cert);
std::string serialize_horseshoe(const HorseshoeReport& rep);
std::string serialize_cantor(const CantorPair& pair);
std::string serialize_flatness(const FlatnessReport& rep);
std::string serialize_misiurewicz(const MisiurewiczReport& rep);
std::string serialize_tangencies(const TangencyScan& scan);

// Piece/box CSV emission for external plotting.
std::string covering_pieces_csv(const Covering1D& cert);
std::string box_corners_csv(const Box2& B, const Box2& image);

// Atomic write (write to <path>.tmp then rename).
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace blenderlab
