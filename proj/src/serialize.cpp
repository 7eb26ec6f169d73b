#include "krausopt/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "krausopt/errors.hpp"

namespace krausopt {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty()) {
    throw ValidationError("matrix: expected a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError("matrix: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& z = row[static_cast<std::size_t>(c)];
      if (z.is_number()) {
        m(r, c) = Complex(z.get<double>(), 0.0);
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
      } else {
        throw ValidationError("matrix: entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

json channel_to_json(const KrausChannel& ch) {
  json ops = json::array();
  for (const auto& h : ch.operators()) ops.push_back(matrix_to_json(h));
  return {{"type", "kraus_channel"},
          {"input_dim", ch.input_dim()},
          {"output_dim", ch.output_dim()},
          {"kraus_rank", ch.kraus_rank()},
          {"operators", std::move(ops)}};
}

KrausChannel channel_from_json(const json& j, double cptp_tol) {
  if (!j.is_object() || !j.contains("operators")) throw ValidationError("channel: missing \"operators\"");
  std::vector<ComplexMatrix> ops;
  for (const auto& op : j.at("operators")) ops.push_back(matrix_from_json(op));
  KrausChannel ch(std::move(ops), cptp_tol);
  auto check = [&](const char* key, std::size_t expected) {
    if (j.contains(key) && j.at(key).get<std::size_t>() != expected) {
      throw ValidationError(std::string("channel: \"") + key + "\" disagrees with the operators");
    }
  };
  check("input_dim", static_cast<std::size_t>(ch.input_dim()));
  check("output_dim", static_cast<std::size_t>(ch.output_dim()));
  check("kraus_rank", ch.kraus_rank());
  return ch;
}

json ensemble_to_json(const Ensemble& e) {
  json states = json::array();
  for (const auto& s : e.states()) states.push_back(matrix_to_json(s.matrix()));
  return {{"type", "ensemble"},
          {"dim", e.dim()},
          {"probabilities", std::vector<double>(e.probabilities().begin(), e.probabilities().end())},
          {"states", std::move(states)}};
}

Ensemble ensemble_from_json(const json& j) {
  if (!j.is_object() || !j.contains("probabilities")) {
    throw ValidationError("ensemble: missing \"probabilities\"");
  }
  auto probs = j.at("probabilities").get<std::vector<double>>();
  if (j.contains("states")) {
    std::vector<DensityMatrix> states;
    for (const auto& s : j.at("states")) states.emplace_back(matrix_from_json(s));
    return Ensemble(std::move(probs), std::move(states));
  }
  if (j.contains("vectors")) {
    std::vector<PureState> states;
    for (const auto& v : j.at("vectors")) {
      const ComplexMatrix col = matrix_from_json(json::array({v})).transpose();
      states.emplace_back(ComplexVector(col.col(0)));
    }
    return Ensemble::from_pure(std::move(probs), states);
  }
  throw ValidationError("ensemble: needs \"states\" or \"vectors\"");
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& err) {
    throw ValidationError(path.string() + ": " + err.what());
  }
}

}  // namespace krausopt
