#include "mixgap/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mixgap/errors.hpp"

namespace mixgap::io {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& token) {
  const std::string t = trim(token);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, "not a number: '" + t + "'");
  }
  require(used == t.size(), ErrorCode::ParseError, "not a number: '" + t + "'");
  return v;
}

Matrix parse_json_matrix(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("matrix JSON: ") + e.what());
  }
  require(j.is_object() && j.contains("rows") && j["rows"].is_array(), ErrorCode::ParseError,
          "matrix JSON needs a \"rows\" array");
  const auto& rows = j["rows"];
  const auto d = static_cast<Eigen::Index>(rows.size());
  if (j.contains("d")) {
    require(j["d"].is_number_integer() && j["d"].get<Eigen::Index>() == d, ErrorCode::ParseError,
            "\"d\" does not match the number of rows");
  }
  require(d >= 1, ErrorCode::ParseError, "matrix has no rows");
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == d, ErrorCode::ParseError,
            "row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      require(v.is_number(), ErrorCode::ParseError, "non-numeric matrix entry");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Matrix parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_double(cell));
    rows.push_back(std::move(row));
  }
  const auto d = static_cast<Eigen::Index>(rows.size());
  require(d >= 1, ErrorCode::ParseError, "matrix CSV is empty");
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    require(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) == d, ErrorCode::ParseError,
            "CSV row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index c = 0; c < d; ++c) m(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  }
  return m;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) flatten(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

}  // namespace

TransitionMatrix parse_matrix(const std::string& text) {
  const std::string body = trim(text);
  require(!body.empty(), ErrorCode::ParseError, "empty matrix input");
  return TransitionMatrix(body.front() == '{' ? parse_json_matrix(body) : parse_csv_matrix(body));
}

TransitionMatrix read_matrix(const std::string& path) { return parse_matrix(slurp(path)); }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"d", m.rows()}, {"rows", std::move(rows)}};
}

std::string matrix_to_csv(const Matrix& m) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  return out.str();
}

void for_each_state(std::istream& in, const std::function<void(std::uint32_t)>& visit) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    require(std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }), ErrorCode::ParseError,
            "line " + std::to_string(lineno) + ": expected a nonnegative integer state");
    unsigned long long v = 0;
    try {
      v = std::stoull(t);
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": state out of range");
    }
    require(v <= 0xFFFFFFFFULL, ErrorCode::ParseError, "line " + std::to_string(lineno) + ": state out of range");
    visit(static_cast<std::uint32_t>(v));
  }
}

void for_each_state(const std::string& path, const std::function<void(std::uint32_t)>& visit) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open " + path);
  for_each_state(in, visit);
}

void write_trajectory(const Trajectory& traj, std::ostream& out) {
  for (std::size_t i = 0; i < traj.size(); ++i) out << traj.states[i] << '\n';
}

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json to_json(const IntervalTerms& t) {
  return Json{{"k", t.k},          {"a_hat", number(t.a_hat)}, {"b_hat", number(t.b_hat)},
              {"c_hat", number(t.c_hat)}, {"d_hat", number(t.d_hat)}, {"tau", number(t.tau)},
              {"g_hat", number(t.g_hat)}, {"gap_used", number(t.gap_used)}};
}

Json to_json(const ConfidenceReport& r) {
  Json per_k = Json::array();
  for (const auto& t : r.per_k_terms) per_k.push_back(to_json(t));
  Json j{{"target", to_string(r.target)},
         {"point", number(r.point)},
         {"half_width", number(r.half_width)},
         {"lower", number(r.lower)},
         {"upper", number(r.upper)},
         {"delta", r.delta},
         {"alpha", r.alpha},
         {"K", r.K},
         {"gap_divisor", r.gap_divisor},
         {"per_k", std::move(per_k)}};
  if (r.implied_gamma_ps) {
    j["implied_gamma_ps"] = {{"lower", number(r.implied_gamma_ps->lower)},
                             {"upper", number(r.implied_gamma_ps->upper)}};
  }
  if (r.implied_tmix) {
    j["implied_tmix"] = {{"lower", number(r.implied_tmix->lower)}, {"upper", number(r.implied_tmix->upper)}};
  }
  return j;
}

Json to_json(const SpectralSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); };
  return Json{{"reversible", s.reversible},
              {"gamma", opt(s.gamma)},
              {"gamma_star", opt(s.gamma_star)},
              {"gamma_ps", number(s.gamma_ps)},
              {"k_ps", s.k_ps},
              {"gamma_ps_dilated", number(s.gamma_ps_dilated)},
              {"k_ps_dilated", s.k_ps_dilated},
              {"gamma_mult_k1", number(s.gamma_mult_k1)},
              {"t_mix", s.t_mix},
              {"xi", s.xi},
              {"balance_beta", number(s.balance_beta)},
              {"pi_min", number(s.pi_min)}};
}

std::string to_csv(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::ostringstream out;
  out << "field,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
  return out.str();
}

std::string to_table(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::size_t width = 0;
  for (const auto& row : rows) width = std::max(width, row.first.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
  return out.str();
}

}  // namespace mixgap::io
