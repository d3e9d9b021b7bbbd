#include "piobs/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace piobs::io {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) {
    throw DimensionError(name + " must be an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) {
    throw DimensionError(name + " must be an array of rows");
  }
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionError(name + " is ragged: row " + std::to_string(i) +
                           " does not have " + std::to_string(cols) +
                           " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw DimensionError(name + "[" + std::to_string(i) + "][" +
                             std::to_string(c) + "] is not a number");
      }
      m(i, c) = row[c].get<double>();
    }
  }
  return m;
}

Json spectrum_to_json(const Spectrum& s) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out.push_back(Json::array({s(i).real(), s(i).imag()}));
  }
  return out;
}

Spectrum spectrum_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) throw DimensionError(name + " must be an array");
  Spectrum s(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
        !e[1].is_number()) {
      throw DimensionError(name + " entries must be [re, im] pairs");
    }
    s(static_cast<Eigen::Index>(i)) = {e[0].get<double>(), e[1].get<double>()};
  }
  return s;
}

namespace {

const Json& require_key(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw DimensionError(std::string("missing key \"") + key + "\"");
  }
  return j.at(key);
}

}  // namespace

Json system_to_json(const StateSpaceSystem& sys) {
  return Json{{"A", matrix_to_json(sys.A())},
              {"B", matrix_to_json(sys.B())},
              {"C", matrix_to_json(sys.C())}};
}

StateSpaceSystem system_from_json(const Json& j, double rank_tol) {
  if (!j.is_object()) throw DimensionError("system must be a JSON object");
  return StateSpaceSystem(matrix_from_json(require_key(j, "A"), "A"),
                          matrix_from_json(require_key(j, "B"), "B"),
                          matrix_from_json(require_key(j, "C"), "C"),
                          rank_tol);
}

Json design_to_json(const ObserverDesign& d) {
  const auto& c = d.certificate;
  Json cert{{"K", matrix_to_json(c.K)},
            {"P", matrix_to_json(c.P)},
            {"Q", matrix_to_json(c.Q)},
            {"X", matrix_to_json(c.X)},
            {"Phi", matrix_to_json(c.Phi)},
            {"q", c.q},
            {"k", c.k},
            {"unplaced_poles", spectrum_to_json(c.unplaced_poles)}};
  Json cond{{"T", d.condition_numbers.T},
            {"P", d.condition_numbers.P},
            {"Q", d.condition_numbers.Q},
            {"Y", d.condition_numbers.Y}};
  return Json{{"L", matrix_to_json(d.L)},
              {"F", matrix_to_json(d.F)},
              {"G", matrix_to_json(d.G)},
              {"T", matrix_to_json(d.T)},
              {"certificate", std::move(cert)},
              {"composite_spectrum", spectrum_to_json(d.composite_spectrum)},
              {"condition_numbers", std::move(cond)}};
}

ObserverDesign design_from_json(const Json& j) {
  if (!j.is_object()) throw DimensionError("design must be a JSON object");
  ObserverDesign d;
  d.L = matrix_from_json(require_key(j, "L"), "L");
  d.F = matrix_from_json(require_key(j, "F"), "F");
  d.G = matrix_from_json(require_key(j, "G"), "G");
  d.T = matrix_from_json(require_key(j, "T"), "T");
  // An empty matrix loses its shape in JSON; restore it from L and G.
  if (d.F.size() == 0) d.F.resize(d.L.rows(), d.G.rows());
  if (j.contains("certificate")) {
    const Json& c = j.at("certificate");
    auto& cert = d.certificate;
    cert.K = matrix_from_json(require_key(c, "K"), "certificate.K");
    cert.P = matrix_from_json(require_key(c, "P"), "certificate.P");
    cert.Q = matrix_from_json(require_key(c, "Q"), "certificate.Q");
    cert.X = matrix_from_json(require_key(c, "X"), "certificate.X");
    cert.Phi = matrix_from_json(require_key(c, "Phi"), "certificate.Phi");
    cert.q = require_key(c, "q").get<int>();
    cert.k = require_key(c, "k").get<int>();
    if (c.contains("unplaced_poles")) {
      cert.unplaced_poles =
          spectrum_from_json(c.at("unplaced_poles"), "unplaced_poles");
    }
  }
  if (j.contains("composite_spectrum")) {
    d.composite_spectrum =
        spectrum_from_json(j.at("composite_spectrum"), "composite_spectrum");
  }
  if (j.contains("condition_numbers")) {
    const Json& c = j.at("condition_numbers");
    d.condition_numbers.T = c.value("T", 1.0);
    d.condition_numbers.P = c.value("P", 1.0);
    d.condition_numbers.Q = c.value("Q", 1.0);
    d.condition_numbers.Y = c.value("Y", 1.0);
  }
  return d;
}

Json detectability_to_json(const DetectabilityReport& r) {
  Json tested = Json::array();
  for (const auto& e : r.tested_eigenvalues) {
    tested.push_back(Json{{"eigenvalue", {e.eigenvalue.real(), e.eigenvalue.imag()}},
                          {"pbh_rank", e.rank},
                          {"required_rank", e.required_rank}});
  }
  return Json{{"detectable", r.detectable},
              {"tolerance", r.tolerance},
              {"tested_eigenvalues", std::move(tested)}};
}

namespace {

std::string strip(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (!std::isspace(static_cast<unsigned char>(ch))) out.push_back(ch);
  }
  return out;
}

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ConfigError("cannot parse number '" + whole + "'");
  return v;
}

std::complex<double> parse_complex(const std::string& raw) {
  const std::string s = strip(raw);
  if (s.empty()) throw ConfigError("empty entry in number list");
  const char last = s.back();
  if (last != 'i' && last != 'j') return {parse_real(s, s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not an exponent sign or the leading sign.
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' &&
        body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(body, s)};
  return {parse_real(body.substr(0, split), s),
          parse_real(body.substr(split), s)};
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

PoleList parse_pole_list(const std::string& text) {
  PoleList poles;
  for (const auto& cell : split_commas(text)) poles.push_back(parse_complex(cell));
  return poles;
}

Vector parse_vector(const std::string& text) {
  const auto cells = split_commas(text);
  Vector v(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string s = strip(cells[i]);
    v(static_cast<Eigen::Index>(i)) = parse_real(s.empty() ? "x" : s, s);
  }
  return v;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace piobs::io
