// twoslit command-line front end.
//
// Exit codes: 0 success, 1 verify-paper mismatch, 2 validation error,
// 3 numerical degeneracy.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twoslit/io.hpp"
#include "twoslit/worked_examples.hpp"

using namespace twoslit;
using io::json;

namespace {

enum Exit { ok = 0, mismatch = 1, validation = 2, degeneracy = 3 };

int exit_for(ErrorCategory c) { return c == ErrorCategory::validation ? validation : degeneracy; }
int exit_for(const std::optional<ErrorCategory>& c) { return c ? exit_for(*c) : ok; }

struct Options {
  std::uint64_t seed = 1;
  std::optional<double> sigma;
  std::size_t points = 70;
  std::size_t cameras = 10;
  std::string in, out;
  std::string format = "json";
};

std::string read_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::invalid_argument, "cannot open " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

bool looks_like_json(const std::string& text) {
  const auto i = text.find_first_not_of(" \t\r\n");
  return i != std::string::npos && (text[i] == '{' || text[i] == '[');
}

std::vector<Correspondence> csv_from(const std::string& text) {
  std::istringstream s(text);
  return io::read_csv(s);
}

class Output {
 public:
  explicit Output(const Options& o) : o_(o) {
    if (!o.out.empty()) {
      file_.open(o.out, std::ios::binary);
      if (!file_) throw Error(Errc::invalid_argument, "cannot write " + o.out);
    }
  }
  std::ostream& stream() { return o_.out.empty() ? std::cout : file_; }
  void put(const json& j) { stream() << j.dump(2) << '\n'; }
  void put(std::span<const Correspondence> c) { io::write_csv(stream(), c); }
  bool csv() const { return o_.format == "csv"; }

 private:
  const Options& o_;
  std::ofstream file_;
};

SyntheticScene scene_from(const Options& o, double default_sigma) {
  SceneConfig cfg;
  cfg.seed = o.seed;
  cfg.sigma = o.sigma.value_or(default_sigma);
  cfg.points = o.points;
  return generate_scene(cfg);
}

// ---- subcommands ------------------------------------------------------------

int cmd_synth(const Options& o) {
  SceneConfig cfg;
  cfg.seed = o.seed;
  cfg.sigma = o.sigma.value_or(cfg.sigma);
  cfg.points = o.points;
  if (!o.in.empty()) cfg.cameras = io::pair_from_json(io::parse(read_input(o.in)));
  const SyntheticScene s = generate_scene(cfg);
  Output out(o);
  if (out.csv()) {
    out.put(s.correspondences);
    return ok;
  }
  json j = io::to_json(s);
  json corr = json::array();
  for (const Correspondence& c : s.correspondences) corr.push_back({io::matrix(c.u), io::matrix(c.v)});
  j["correspondences"] = corr;
  out.put(j);
  return ok;
}

int cmd_project(const Options& o) {
  std::vector<TwoSlitCamera> cams;
  std::vector<ProjPoint> points;
  if (o.in.empty()) {
    const CameraPair p = worked::integer_pair();
    cams = {p.a, p.b};
  } else {
    const json j = io::parse(read_input(o.in));
    if (j.is_object() && j.contains("A1")) {
      cams = {io::camera_from_json(j)};
    } else if (j.is_object() && j.contains("a")) {
      const CameraPair p = io::pair_from_json(j);
      cams = {p.a, p.b};
    } else {
      cams = io::cameras_from_json(j);
    }
    if (j.is_object() && j.contains("points")) {
      if (!j.at("points").is_array()) throw Error(Errc::parse_error, "points must be a list");
      for (const json& x : j.at("points")) points.push_back(io::point_from_json(x));
    }
  }
  if (cams.empty()) throw Error(Errc::invalid_argument, "no cameras given");
  if (points.empty()) {
    Rng rng(o.seed);
    for (std::size_t i = 0; i < o.points; ++i)
      points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0);
  }

  std::vector<std::vector<Vec3>> images(cams.size());
  for (std::size_t c = 0; c < cams.size(); ++c)
    for (const ProjPoint& x : points) images[c].push_back(project(cams[c], x));

  Output out(o);
  if (out.csv()) {
    if (cams.size() != 2) throw Error(Errc::invalid_argument, "CSV output needs exactly two cameras");
    std::vector<Correspondence> corr;
    for (std::size_t i = 0; i < points.size(); ++i) corr.push_back({images[0][i], images[1][i]});
    out.put(corr);
    return ok;
  }
  json pts = json::array(), imgs = json::array();
  for (const ProjPoint& x : points) pts.push_back(io::to_json(x));
  for (const auto& per : images) {
    json a = json::array();
    for (const Vec3& u : per) a.push_back(io::matrix(u));
    imgs.push_back(a);
  }
  out.put(json{{"cameras", io::to_json(cams)}, {"points", pts}, {"images", imgs}});
  return ok;
}

int cmd_tensor(const Options& o) {
  json j;
  if (o.in.empty()) {
    j["source"] = "cameras";
    j["tensor"] = io::to_json(tensor_from_cameras(worked::integer_pair()));
  } else {
    const std::string text = read_input(o.in);
    if (looks_like_json(text)) {
      j["source"] = "cameras";
      j["tensor"] = io::to_json(tensor_from_cameras(io::pair_from_json(io::parse(text))));
    } else {
      const auto corr = csv_from(text);
      const EpipolarTensor F = estimate_tensor_linear(corr);
      const ResidualSummary r = epipolar_summary(F, corr);
      j["source"] = "correspondences";
      j["correspondences"] = corr.size();
      j["tensor"] = io::to_json(F);
      j["epipolar_residual"] = {{"mean_abs", r.mean_abs}, {"max_abs", r.max_abs}};
    }
  }
  Output out(o);
  if (out.csv()) throw Error(Errc::invalid_argument, "tensor output is JSON only");
  out.put(j);
  return ok;
}

int cmd_sfm(const Options& o) {
  SyntheticScene scene;
  if (o.in.empty()) {
    scene = scene_from(o, 1e-5);
  } else {
    scene.correspondences = csv_from(read_input(o.in));
  }
  Output out(o);
  if (out.csv()) throw Error(Errc::invalid_argument, "sfm output is JSON only");
  const SfmReport r = run_sfm_experiment(scene);
  out.put(io::to_json(r));
  return exit_for(r.error_category);
}

int cmd_selfcal(const Options& o) {
  Output out(o);
  if (out.csv()) throw Error(Errc::invalid_argument, "selfcal output is JSON only");
  if (!o.in.empty()) {
    const auto cams = io::cameras_from_json(io::parse(read_input(o.in)));
    const DualAbsoluteQuadric M = estimate_daq(cams);
    json j = io::to_json(extract_upgrade(M, cams));
    j["status"] = "ok";
    j["M"] = io::matrix(M.M());
    out.put(j);
    return ok;
  }
  SelfcalConfig cfg;
  cfg.seed = o.seed;
  cfg.noise = o.sigma.value_or(0.0);
  cfg.cameras = o.cameras;
  const SelfcalReport r = run_selfcal_experiment(cfg);
  out.put(io::to_json(r));
  return exit_for(r.error_category);
}

// ---- verify-paper -----------------------------------------------------------

struct Checks {
  json list = json::array();
  bool all = true;

  void add(const std::string& name, double value, double tolerance) {
    const bool pass = std::isfinite(value) && value <= tolerance;
    all = all && pass;
    list.push_back({{"check", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
  }
};

void check_tensor(Checks& c) {
  const EpipolarTensor F = tensor_from_cameras(worked::integer_pair());
  c.add("tensor_entries_max_abs_error", (F.data() - worked::integer_pair_tensor()).cwiseAbs().maxCoeff(), 0.0);
}

void check_recovery(Checks& c) {
  const EpipolarTensor F(worked::integer_pair_tensor());
  const Configurations conf = two_configurations(recover_minor_matrices(F).front().C);
  // Each configuration is in the gauge A1 = e_m, so only the second rows vary.
  auto rows = [](const CameraPair& p) {
    Mat4 R;
    R << p.a.A1().row(1), p.a.A2().row(1), p.b.A1().row(1), p.b.A2().row(1);
    return R;
  };
  auto gauge = [](const CameraPair& p) {
    Mat4 R;
    R << p.a.A1().row(0), p.a.A2().row(0), p.b.A1().row(0), p.b.A2().row(0);
    return (R - Mat4::Identity()).cwiseAbs().maxCoeff();
  };
  const Mat4 r1 = rows(conf.first), r2 = rows(conf.second);
  const Mat4 e1 = worked::recovered_rows_first(), e2 = worked::recovered_rows_second();
  const double same = std::max((r1 - e1).cwiseAbs().maxCoeff(), (r2 - e2).cwiseAbs().maxCoeff());
  const double swapped = std::max((r1 - e2).cwiseAbs().maxCoeff(), (r2 - e1).cwiseAbs().maxCoeff());
  c.add("recovered_entries_max_abs_error",
        std::max(std::min(same, swapped), std::max(gauge(conf.first), gauge(conf.second))), 0.01);
  c.add("recovered_tensor_agreement",
        std::max(tensor_distance(tensor_from_cameras(conf.first), F), tensor_distance(tensor_from_cameras(conf.second), F)),
        1e-9);
}

void check_selfcal(Checks& c) {
  const Mat4 Q = worked::upgrade_Q();
  const Mat4 M = Q * Vec4(1, 1, 1, 0).asDiagonal() * Q.transpose();
  c.add("quadric_display_max_abs_error", (M / M(0, 0) - worked::upgrade_daq_display()).cwiseAbs().maxCoeff(), 0.01);
  const SelfcalReport clean = run_selfcal_experiment({});
  c.add("noiseless_magnification_relative_error", clean.ok() ? clean.magnification_error : NAN, 1e-6);
  SelfcalConfig noisy;
  noisy.noise = 1e-4;
  const SelfcalReport r = run_selfcal_experiment(noisy);
  const double m1 = r.ok() ? r.upgrade->calibrations[0].magnification1 : NAN;
  const double m2 = r.ok() ? r.upgrade->calibrations[0].magnification2 : NAN;
  c.add("noisy_magnification1_abs_error", std::abs(m1 - worked::first_camera_fu), 0.05);
  c.add("noisy_magnification2_abs_error", std::abs(m2 - worked::first_camera_fv), 0.05);
  c.add("noisy_magnification1_vs_reported", std::abs(m1 - worked::reported_magnification1), 0.05);
  c.add("noisy_magnification2_vs_reported", std::abs(m2 - worked::reported_magnification2), 0.05);
}

void check_projection(Checks& c) {
  Mat36 N;
  N << 1, 0, 0, 0, -1, 0,
       0, 1, 0, 1, 0, 0,
       0, 0, 1, 0, 0, 0;
  c.add("line_to_image_matrix_relative_error",
        (build_line_to_image(worked::unit_square_frame()).N - N).norm() / N.norm(), 1e-12);
  const ParallelDecomposition d = decompose_parallel(worked::unit_square_camera());
  c.add("unit_square_theta_error", std::abs(d.theta - std::numbers::pi / 2), 1e-12);
  c.add("unit_square_distance_error", std::abs(d.d - 1.0), 1e-12);
}

int cmd_verify(const Options& o) {
  Checks c;
  check_tensor(c);
  check_recovery(c);
  check_selfcal(c);
  check_projection(c);
  Output out(o);
  if (out.csv()) throw Error(Errc::invalid_argument, "verify-paper output is JSON only");
  out.put(json{{"status", c.all ? "ok" : "mismatch"}, {"checks", c.list}});
  return c.all ? ok : mismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-slit and pushbroom camera geometry"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool scene_flags) {
    sub->add_option("--in", o.in, "input file (JSON, or CSV correspondences)");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    if (scene_flags) {
      sub->add_option("--seed", o.seed, "random seed");
      sub->add_option("--sigma", o.sigma, "noise standard deviation")->check(CLI::NonNegativeNumber);
      sub->add_option("--points", o.points, "number of scene points")->check(CLI::PositiveNumber);
    }
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  auto* proj = app.add_subcommand("project", "project points through cameras");
  auto* tensor = app.add_subcommand("tensor", "epipolar tensor from cameras or correspondences");
  auto* sfm = app.add_subcommand("sfm", "linear structure from motion");
  auto* selfcal = app.add_subcommand("selfcal", "self-calibration of parallel cameras");
  auto* verify = app.add_subcommand("verify-paper", "check the worked numeric examples");
  for (CLI::App* s : {synth, proj, sfm, selfcal}) common(s, true);
  for (CLI::App* s : {tensor, verify}) common(s, false);
  selfcal->add_option("--cameras", o.cameras, "number of cameras")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : validation;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*proj) return cmd_project(o);
    if (*tensor) return cmd_tensor(o);
    if (*sfm) return cmd_sfm(o);
    if (*selfcal) return cmd_selfcal(o);
    return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return validation;
  }
}
