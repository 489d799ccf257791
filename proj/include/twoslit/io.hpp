#pragma once

// JSON and CSV encodings. Matrices are row-major nested arrays, Plücker
// lines use the (l41, l42, l43, l23, l31, l12) order, tensors are 16 values
// with (i, j, k, l) lexicographic and l fastest.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "twoslit/harness.hpp"

namespace twoslit::io {

using json = nlohmann::json;

template <class Derived>
json matrix(const Eigen::MatrixBase<Derived>& m) {
  if (m.cols() == 1) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(m(i, 0));
    return a;
  }
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

template <int R, int C>
Eigen::Matrix<double, R, C> read_matrix(const json& j, const char* what) {
  Eigen::Matrix<double, R, C> m;
  try {
    if constexpr (C == 1) {
      if (!j.is_array() || j.size() != R)
        throw Error(Errc::shape_mismatch, std::string(what) + ": expected " + std::to_string(R) + " values");
      for (int i = 0; i < R; ++i) m(i, 0) = j.at(static_cast<std::size_t>(i)).get<double>();
    } else {
      if (!j.is_array() || j.size() != R)
        throw Error(Errc::shape_mismatch, std::string(what) + ": expected " + std::to_string(R) + " rows");
      for (int i = 0; i < R; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || row.size() != C)
          throw Error(Errc::shape_mismatch, std::string(what) + ": expected " + std::to_string(C) + " columns");
        for (int k = 0; k < C; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string(what) + ": " + e.what());
  }
  return m;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(Errc::parse_error, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

inline json parse(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

// --- projective core -------------------------------------------------------

inline json to_json(const ProjPoint& x) { return matrix(x.coords()); }
inline json to_json(const ProjPlane& w) { return matrix(w.coords()); }
inline json to_json(const PluckerLine& l) { return matrix(l.coords()); }
inline json to_json(const RetinalFrame& f) { return matrix(f.Y()); }

inline ProjPoint point_from_json(const json& j) { return ProjPoint(read_matrix<4, 1>(j, "point")); }
inline ProjPlane plane_from_json(const json& j) { return ProjPlane(read_matrix<4, 1>(j, "plane")); }
inline PluckerLine line_from_json(const json& j) { return PluckerLine(read_matrix<6, 1>(j, "line")); }
inline RetinalFrame frame_from_json(const json& j) { return RetinalFrame(read_matrix<4, 3>(j, "frame")); }

// --- congruences ------------------------------------------------------------

inline json to_json(const TwoSlitCongruence& c) { return {{"l1", to_json(c.l1())}, {"l2", to_json(c.l2())}}; }

inline TwoSlitCongruence congruence_from_json(const json& j) {
  return {line_from_json(field(j, "l1")), line_from_json(field(j, "l2"))};
}

inline json to_json(const GeneralCongruence& c) {
  return {{"beta", c.beta()}, {"f", c.f().c}, {"g", c.g().c}, {"h", c.h().c}};
}

inline GeneralCongruence general_congruence_from_json(const json& j) {
  try {
    return GeneralCongruence(field(j, "beta").get<int>(), BinaryForm{field(j, "f").get<std::vector<double>>()},
                             BinaryForm{field(j, "g").get<std::vector<double>>()},
                             BinaryForm{field(j, "h").get<std::vector<double>>()});
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

// --- cameras ----------------------------------------------------------------

inline json to_json(const TwoSlitCamera& c) { return {{"A1", matrix(c.A1())}, {"A2", matrix(c.A2())}}; }

inline TwoSlitCamera camera_from_json(const json& j) {
  return {read_matrix<2, 4>(field(j, "A1"), "A1"), read_matrix<2, 4>(field(j, "A2"), "A2")};
}

inline std::vector<TwoSlitCamera> cameras_from_json(const json& j) {
  const json& list = j.is_object() && j.contains("cameras") ? j.at("cameras") : j;
  if (!list.is_array()) throw Error(Errc::parse_error, "expected a list of cameras");
  std::vector<TwoSlitCamera> out;
  for (const json& c : list) out.push_back(camera_from_json(c));
  return out;
}

inline json to_json(const std::vector<TwoSlitCamera>& cams) {
  json a = json::array();
  for (const auto& c : cams) a.push_back(to_json(c));
  return a;
}

inline json to_json(const CameraPair& p) { return {{"a", to_json(p.a)}, {"b", to_json(p.b)}}; }

inline CameraPair pair_from_json(const json& j) {
  if (j.is_array()) {
    const auto cams = cameras_from_json(j);
    if (cams.size() != 2) throw Error(Errc::shape_mismatch, "expected exactly two cameras");
    return {cams[0], cams[1]};
  }
  if (j.contains("cameras")) return pair_from_json(j.at("cameras"));
  return {camera_from_json(field(j, "a")), camera_from_json(field(j, "b"))};
}

inline json to_json(const ParallelDecomposition& d) {
  return {{"K1", matrix(d.K1)}, {"K2", matrix(d.K2)}, {"r1", matrix(d.r1)}, {"r2", matrix(d.r2)},
          {"r3", matrix(d.r3)}, {"t", {d.t1, d.t2, d.t3, d.t4}}, {"theta", d.theta}, {"d", d.d},
          {"fu", d.fu()}, {"fv", d.fv()}, {"u0", d.u0()}, {"v0", d.v0()}};
}

inline json to_json(const PushbroomDecomposition& d) {
  return {{"K1", matrix(d.K1)}, {"K2", matrix(d.K2)}, {"r1", matrix(d.r1)}, {"r2", matrix(d.r2)},
          {"r3", matrix(d.r3)}, {"t", {d.t1, d.t2, d.t3}}, {"theta", d.theta}, {"v", d.v()},
          {"f", d.f()},         {"u", d.u()}};
}

// --- epipolar ---------------------------------------------------------------

inline json to_json(const EpipolarTensor& F) { return matrix(F.data()); }

inline EpipolarTensor tensor_from_json(const json& j) {
  const json& f = j.is_object() ? field(j, "tensor") : j;
  return EpipolarTensor(read_matrix<16, 1>(f, "tensor"));
}

inline json to_json(const MinorMatrix& C) { return matrix(C.C()); }

inline json to_json(const Configurations& c) {
  return {{"first", to_json(c.first)}, {"second", to_json(c.second)}};
}

// --- self-calibration ---------------------------------------------------------

inline json to_json(const CameraCalibration& c) {
  return {{"K1", matrix(c.K1)},
          {"K2", matrix(c.K2)},
          {"magnifications", {c.magnification1, c.magnification2}},
          {"parallel", c.parallel}};
}

inline json to_json(const UpgradeResult& u) {
  json cal = json::array();
  for (const auto& c : u.calibrations) cal.push_back(to_json(c));
  return {{"Qprime", matrix(u.Qprime)}, {"eigenvalues", matrix(u.eigenvalues)}, {"calibrations", cal}};
}

inline json to_json(const SimilarityCheck& s) {
  return {{"T", matrix(s.T)},
          {"scale", s.scale},
          {"orthogonality_error", s.orthogonality_error},
          {"affine_error", s.affine_error}};
}

// --- harness ------------------------------------------------------------------

inline json status_json(const std::string& status, const std::optional<ErrorCategory>& cat,
                        const std::string& message) {
  json j = {{"status", status}};
  if (cat) {
    j["category"] = *cat == ErrorCategory::validation ? "validation" : "degeneracy";
    j["message"] = message;
  }
  return j;
}

inline json to_json(const SyntheticScene& s) {
  json pts = json::array();
  for (const auto& p : s.points) pts.push_back(to_json(p));
  return {{"rng", Rng::algorithm}, {"seed", s.rng_seed}, {"noise_sigma", s.noise_sigma},
          {"cameras", to_json(s.cameras)}, {"points", pts}};
}

inline json to_json(const SfmReport& r) {
  json j = status_json(r.status, r.error_category, r.message);
  j["rng"] = r.rng_algorithm;
  j["seed"] = r.seed;
  j["sigma"] = r.sigma;
  j["correspondences"] = r.correspondences;
  if (r.tensor) {
    j["tensor"] = to_json(*r.tensor);
    j["epipolar_residual"] = {{"mean_abs", r.epipolar.mean_abs}, {"max_abs", r.epipolar.max_abs}};
  }
  if (!r.candidate_residuals.empty()) j["candidate_residuals"] = r.candidate_residuals;
  if (r.minor_matrix) j["minor_matrix"] = to_json(*r.minor_matrix);
  if (r.configurations) {
    j["configurations"] = to_json(*r.configurations);
    j["tensor_agreement"] = r.tensor_agreement;
    j["reprojection_rms"] = r.reprojection_rms;
    if (r.equivalent_configuration >= 0) {
      j["equivalence_residual"] = r.equivalence_residual;
      j["equivalent_configuration"] = r.equivalent_configuration;
    }
  }
  return j;
}

inline json to_json(const SelfcalReport& r) {
  json j = status_json(r.status, r.error_category, r.message);
  j["rng"] = r.rng_algorithm;
  j["seed"] = r.seed;
  j["noise"] = r.noise;
  j["Q"] = matrix(r.Q);
  j["cameras"] = to_json(r.cameras);
  j["true_magnifications"] = r.true_magnifications;
  if (r.estimate) {
    j["M"] = matrix(r.estimate->M());
    j["daq_error"] = r.daq_error;
  }
  if (r.upgrade) {
    const json u = to_json(*r.upgrade);
    for (const auto& [k, v] : u.items()) j[k] = v;
    j["magnification_error"] = r.magnification_error;
  }
  if (r.similarity) j["similarity"] = to_json(*r.similarity);
  return j;
}

// --- CSV --------------------------------------------------------------------

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_csv(std::ostream& out, std::span<const Correspondence> corrs) {
  out << "u1,u2,u3,v1,v2,v3\n";
  for (const Correspondence& c : corrs) {
    out << format_double(c.u[0]) << ',' << format_double(c.u[1]) << ',' << format_double(c.u[2]) << ','
        << format_double(c.v[0]) << ',' << format_double(c.v[1]) << ',' << format_double(c.v[2]) << '\n';
  }
}

inline std::vector<Correspondence> read_csv(std::istream& in) {
  std::vector<Correspondence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("u1", 0) == 0) continue;
    std::istringstream ls(line);
    std::string cell;
    double v[6];
    int n = 0;
    while (std::getline(ls, cell, ',')) {
      if (n >= 6) throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": too many columns");
      try {
        std::size_t used = 0;
        v[n] = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      ++n;
    }
    if (n != 6) throw Error(Errc::parse_error, "line " + std::to_string(lineno) + ": expected 6 columns");
    out.push_back({Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
  }
  return out;
}

}  // namespace twoslit::io
