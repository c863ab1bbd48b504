#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mixgap/confidence.hpp"

namespace mixgap::io {

using Json = nlohmann::ordered_json;

/// {"d": int, "rows": [[...], ...]} or d lines of comma-separated values.
/// The format is taken from the content, not the file name.
TransitionMatrix parse_matrix(const std::string& text);
TransitionMatrix read_matrix(const std::string& path);

Json matrix_to_json(const Matrix& m);
std::string matrix_to_csv(const Matrix& m);

/// One 0-based state per line; blank lines are skipped. The callback sees
/// each state in order, so nothing but counts needs to be kept in memory.
void for_each_state(std::istream& in, const std::function<void(std::uint32_t)>& visit);
void for_each_state(const std::string& path, const std::function<void(std::uint32_t)>& visit);

void write_trajectory(const Trajectory& traj, std::ostream& out);

/// Non-finite values become the strings "inf", "-inf" or "nan".
Json number(double x);

Json to_json(const IntervalTerms& t);
Json to_json(const ConfidenceReport& r);
Json to_json(const SpectralSummary& s);

/// Flattened "path,value" rows and an aligned two-column table.
std::string to_csv(const Json& j);
std::string to_table(const Json& j);

}  // namespace mixgap::io
