#pragma once

#include "pwave/asymptotics.hpp"
#include "pwave/classical_gl.hpp"
#include "pwave/linearization.hpp"
#include "pwave/planar.hpp"
#include "pwave/radial_core.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace pwave {

/// `r,f_minus,f_plus`, one row per node, %.17g.
std::string profile_csv(const ProfilePair& p);
/// `r,h`
std::string h_csv(const HSolution& h);
/// `r,theta,re_eta_minus,im_eta_minus,re_eta_plus,im_eta_plus`
std::string planar_csv(const PlanarField& f);

void write_text(const std::filesystem::path& path, std::string_view content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const TailModel& m);
nlohmann::json to_json(const TailFit& f);
nlohmann::json to_json(const PohozaevReport& p, bool with_profile = false);
nlohmann::json to_json(const DerivativeTailReport& d);
nlohmann::json to_json(const FourierDiagnostics& f);

/// Hex SHA-1 of "blob <len>\0<content>", as computed by `git hash-object`.
std::string git_blob_sha1(std::string_view content);

} // namespace pwave
