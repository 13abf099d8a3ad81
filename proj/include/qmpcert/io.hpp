#pragma once

#include "capacity.hpp"
#include "qmp.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qmpcert::io {

using json = nlohmann::json;

struct ParseError : ArgumentError {
  using ArgumentError::ArgumentError;
};

// Parse failures carry nlohmann's "line L, column C" position.
inline json parse_json(const std::string& text, const std::string& origin = "<input>") {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

// %.17g, enough digits to round-trip any double.
inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline LabeledSpace space_from_json(const json& labels) {
  if (!labels.is_array()) throw ParseError("'labels' must be an array");
  std::vector<Label> ls;
  for (const auto& l : labels) ls.push_back({get_field<std::string>(l, "name"), get_field<int>(l, "dim")});
  return LabeledSpace(std::move(ls));
}

inline json space_to_json(const LabeledSpace& s) {
  json a = json::array();
  for (std::size_t i = 0; i < s.size(); ++i) a.push_back({{"name", s[i].name}, {"dim", s[i].dim}});
  return a;
}

inline CMatrix matrix_from_json(const json& re, const json* im, std::size_t dim) {
  auto rows = re.get<std::vector<std::vector<double>>>();
  if (rows.size() != dim) throw ParseError("matrix row count differs from the label dimensions");
  std::vector<std::vector<double>> irows;
  if (im) {
    irows = im->get<std::vector<std::vector<double>>>();
    if (irows.size() != dim) throw ParseError("'im' row count differs from 're'");
  }
  CMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (rows[i].size() != dim || (im && irows[i].size() != dim)) throw ParseError("matrix is not square");
    for (std::size_t j = 0; j < dim; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cplx(rows[i][j], im ? irows[i][j] : 0.0);
  }
  return m;
}

// {"labels":[{"name","dim"}…], "re":[[…]], "im":[[…]]}; "im" may be omitted.
inline Operator operator_from_json(const json& j) {
  try {
    LabeledSpace s = space_from_json(get_field<json>(j, "labels"));
    const json re = get_field<json>(j, "re");
    const json* im = j.contains("im") ? &j.at("im") : nullptr;
    return Operator(s, matrix_from_json(re, im, s.total_dim()));
  } catch (const json::exception& e) {
    throw ParseError(std::string("operator: ") + e.what());
  }
}

inline json operator_to_json(const Operator& o) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < o.mat.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index k = 0; k < o.mat.cols(); ++k) {
      r.push_back(o.mat(i, k).real());
      c.push_back(o.mat(i, k).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"labels", space_to_json(o.space)}, {"re", re}, {"im", im}};
}

inline CVector cvector_from_json(const json& re, const json* im) {
  auto r = re.get<std::vector<double>>();
  std::vector<double> i(r.size(), 0.0);
  if (im) {
    i = im->get<std::vector<double>>();
    if (i.size() != r.size()) throw ParseError("amplitude parts differ in length");
  }
  CVector v(static_cast<Eigen::Index>(r.size()));
  for (std::size_t k = 0; k < r.size(); ++k) v(static_cast<Eigen::Index>(k)) = cplx(r[k], i[k]);
  return v;
}

inline json cvector_to_json(const CVector& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    re.push_back(v(k).real());
    im.push_back(v(k).imag());
  }
  return {{"amp_re", re}, {"amp_im", im}};
}

// {"labels":[…], "amp_re":[…], "amp_im":[…]}
inline PureState pure_state_from_json(const json& j) {
  try {
    LabeledSpace s = space_from_json(get_field<json>(j, "labels"));
    CVector v = cvector_from_json(get_field<json>(j, "amp_re"), j.contains("amp_im") ? &j.at("amp_im") : nullptr);
    if (static_cast<std::size_t>(v.size()) != s.total_dim()) throw ParseError("amplitude length differs from dims");
    return PureState(s, v);
  } catch (const json::exception& e) {
    throw ParseError(std::string("state: ") + e.what());
  }
}

inline json pure_state_to_json(const PureState& p) {
  json j = cvector_to_json(p.amp);
  j["labels"] = space_to_json(p.space);
  return j;
}

// Scenario bundle: {"joint":[labels], "contexts":[["A","B"],…], "marginals":[operator…]}
// or with "state" (a joint pure state) in place of "marginals".
struct Bundle {
  MarginalScenario scenario;
  MProductState state;
};

inline Bundle bundle_from_json(const json& j, const Tolerances& tol = {}) {
  LabeledSpace joint = space_from_json(get_field<json>(j, "joint"));
  auto ctx = get_field<std::vector<std::vector<std::string>>>(j, "contexts");
  MarginalScenario sc(joint, ctx);
  std::vector<DensityOperator> ms;
  if (j.contains("state")) {
    ms = sc.marginals_of(pure_state_from_json(j.at("state")));
  } else {
    const auto arr = get_field<json>(j, "marginals");
    if (!arr.is_array()) throw ParseError("'marginals' must be an array");
    for (const auto& m : arr) ms.emplace_back(operator_from_json(m), tol);
  }
  MProductState st(sc, std::move(ms));
  return {std::move(sc), std::move(st)};
}

inline json bundle_to_json(const Bundle& b) {
  json ms = json::array();
  for (const auto& m : b.state.marginals) ms.push_back(operator_to_json(m.op));
  return {{"joint", space_to_json(b.scenario.joint())}, {"contexts", b.scenario.context_names()}, {"marginals", ms}};
}

inline json certificate_to_json(const RealizabilityCertificate& c) {
  json j{{"level", c.level},
         {"gap", c.gap},
         {"verdict", to_string(c.verdict)},
         {"witness_value", c.witness_value},
         {"near_zero_warning", c.near_zero_warning},
         {"matrix_free", c.matrix_free}};
  j["witness"] = c.witness.size() ? cvector_to_json(c.witness) : json(nullptr);
  return j;
}

// {"rank":r, "weights":[[…]…], "amplitudes":[[…]…], "amplitudes_im":[[…]…]}; one block per weight.
struct TorusInput {
  TorusRep rep;
  TorusVector v;
};

inline TorusInput torus_from_json(const json& j) {
  try {
    TorusInput t;
    t.rep = TorusRep(get_field<int>(j, "rank"), get_field<std::vector<std::vector<int>>>(j, "weights"));
    const auto amps = get_field<std::vector<json>>(j, "amplitudes");
    if (amps.size() != t.rep.size()) throw ParseError("one amplitude block per weight required");
    std::vector<json> ims;
    if (j.contains("amplitudes_im")) {
      ims = j.at("amplitudes_im").get<std::vector<json>>();
      if (ims.size() != amps.size()) throw ParseError("'amplitudes_im' length differs from 'amplitudes'");
    }
    for (std::size_t i = 0; i < amps.size(); ++i) t.v.push_back(cvector_from_json(amps[i], ims.empty() ? nullptr : &ims[i]));
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("torus rep: ") + e.what());
  }
}

inline std::vector<double> to_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

inline json capacity_to_json(const CapacityResult& c) {
  return {{"capacity", c.value},
          {"minimizer", to_std(c.minimizer)},
          {"moment_map", to_std(c.moment_map)},
          {"unbounded", c.unbounded},
          {"iterations", c.iterations}};
}

// Comma-separated, '\n' terminated, header first.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

}  // namespace qmpcert::io
