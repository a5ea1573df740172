#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "stefan/core.hpp"

namespace stefan {

/// Shortest round-trip decimal form of a double ("inf"/"nan" for non-finite).
std::string format_double(double x);

PiecewiseProfile profile_from_json(const nlohmann::json& segments, double default_anchor);
nlohmann::json profile_to_json(const PiecewiseProfile& profile);

/// {r0, lambda0minus, gamma, C, segments:[{lo, hi, kind, params}]}; hi may be "inf".
InitialData initial_data_from_json(const nlohmann::json& doc);
nlohmann::json initial_data_to_json(const InitialData& data);
InitialData load_initial_data(const std::string& path);

/// CSV `t,lambda,lambda_left`.
void write_boundary_csv(std::ostream& out, const Boundary& boundary);
Boundary read_boundary_csv(std::istream& in);

/// CSV `x,w,phase`.
void write_field_csv(std::ostream& out, const TemperatureField& field);
/// Reads `x,w` or `x,w,phase`; the phase column is ignored.
TemperatureField read_field_csv(std::istream& in);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace stefan
