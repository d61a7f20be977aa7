#include "spinnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinnet/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spinnet {

ScalingFit fit_scaling(const std::vector<std::pair<int, double>>& curve, int from_epoch,
                       int to_epoch) {
  ScalingFit fit;
  std::vector<std::pair<double, double>> pts;  // (ln epoch, ln error)
  for (const auto& [epoch, err] : curve) {
    if (epoch < from_epoch || epoch > to_epoch) continue;
    if (epoch < 1) throw ContractError("epochs must be >= 1");
    if (err < 0.0 || err > 1.0) throw ContractError("error rate outside [0,1]");
    if (err == 0.0) {
      ++fit.zero_points_excluded;
      continue;
    }
    pts.push_back({std::log(static_cast<double>(epoch)), std::log(err)});
    if (fit.points_used == 0) fit.first_epoch = epoch;
    fit.last_epoch = epoch;
    ++fit.points_used;
  }
  if (fit.points_used < 5)
    throw InsufficientDataError("scaling fit needs >= 5 usable points, got " +
                                std::to_string(fit.points_used));

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InsufficientDataError("degenerate epoch range in scaling fit");
  const double slope = (n * sxy - sx * sy) / denom;
  fit.z = -slope;
  fit.log_intercept = (sy - slope * sx) / n;

  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : pts) {
    double pred = fit.log_intercept + slope * x;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

std::vector<double> hamming_matrix(const std::vector<SpinState>& states, bool parallel) {
  const int n = static_cast<int>(states.size());
  if (n < 1) throw ContractError("no states");
  for (const auto& s : states)
    if (s.size() != states[0].size()) throw DimensionError("states have unequal lengths");
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double h = hamming(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]);
      d[static_cast<std::size_t>(i) * n + j] = h;
      d[static_cast<std::size_t>(j) * n + i] = h;
    }
  }
  (void)parallel;
  return d;
}

std::vector<double> hamming_matrix_serial(const std::vector<SpinState>& states) {
  return hamming_matrix(states, false);
}

namespace {

double mds_stress(const std::vector<std::array<double, 2>>& x, const std::vector<double>& delta,
                  int n) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = x[static_cast<std::size_t>(i)][0] - x[static_cast<std::size_t>(j)][0];
      double dy = x[static_cast<std::size_t>(i)][1] - x[static_cast<std::size_t>(j)][1];
      double dij = std::sqrt(dx * dx + dy * dy);
      double target = delta[static_cast<std::size_t>(i) * n + j];
      num += (dij - target) * (dij - target);
      den += target * target;
    }
  }
  return den == 0.0 ? 0.0 : num / den;
}

}  // namespace

MdsResult mds_project(const std::vector<SpinState>& states, std::uint64_t seed, int max_iter,
                      double tol, bool parallel) {
  const int n = static_cast<int>(states.size());
  if (n < 2) throw ContractError("MDS needs at least 2 states");
  std::vector<double> delta = hamming_matrix(states, parallel);

  MdsResult res;
  res.coords.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  double max_delta = 0.0;
  for (double v : delta) max_delta = std::max(max_delta, v);
  if (max_delta == 0.0) return res;  // all states identical: all points at the origin

  Rng rng(derive_seed(seed, 0x3d5ULL));
  for (auto& c : res.coords) {
    c[0] = rng.uniform(-max_delta / 2.0, max_delta / 2.0);
    c[1] = rng.uniform(-max_delta / 2.0, max_delta / 2.0);
  }

  std::vector<std::array<double, 2>> next(static_cast<std::size_t>(n));
  double stress = mds_stress(res.coords, delta, n);
  for (int iter = 1; iter <= max_iter; ++iter) {
    // Guttman transform with uniform weights
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && n >= 256)
#endif
    for (int i = 0; i < n; ++i) {
      double ax = 0.0, ay = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double dx = res.coords[static_cast<std::size_t>(i)][0] - res.coords[static_cast<std::size_t>(j)][0];
        double dy = res.coords[static_cast<std::size_t>(i)][1] - res.coords[static_cast<std::size_t>(j)][1];
        double dij = std::sqrt(dx * dx + dy * dy);
        double b = dij > 0.0 ? delta[static_cast<std::size_t>(i) * n + j] / dij : 0.0;
        ax += b * dx;
        ay += b * dy;
      }
      next[static_cast<std::size_t>(i)] = {ax / n, ay / n};
    }
    res.coords.swap(next);
    res.iterations = iter;

    double new_stress = mds_stress(res.coords, delta, n);
    if (stress > 0.0 && (stress - new_stress) / stress < tol && new_stress <= stress) {
      stress = new_stress;
      break;
    }
    stress = new_stress;
    if (stress == 0.0) break;
  }
  res.stress = stress;
  return res;
}

LandscapeSnapshot landscape_snapshot(const NetworkParams& params, const Dataset& test_set,
                                     int samples_per_image, const AnnealConfig& sampler,
                                     std::uint64_t seed, int epoch_tag, bool parallel) {
  if (test_set.size() < 1) throw ContractError("empty test set");
  if (samples_per_image < 1) throw ContractError("samples_per_image must be >= 1");

  std::vector<SpinState> all_states(
      static_cast<std::size_t>(test_set.size()) * samples_per_image);
  std::vector<int> classes(all_states.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int img = 0; img < test_set.size(); ++img) {
    IsingProblem problem =
        build_system_hamiltonian(params, test_set.images[static_cast<std::size_t>(img)]);
    AnnealConfig cfg = sampler;
    cfg.rng_seed = derive_seed(seed, static_cast<std::uint64_t>(img));
    SampleBatch batch = sample_batch(problem, {}, samples_per_image, cfg, false);
    for (int k = 0; k < samples_per_image; ++k) {
      std::size_t at = static_cast<std::size_t>(img) * samples_per_image + k;
      all_states[at] = batch.states[static_cast<std::size_t>(k)];
      classes[at] = decode(all_states[at], params);
    }
  }
  (void)parallel;

  MdsResult mds = mds_project(all_states, derive_seed(seed, 0x4d5ULL), 300, 1e-6, parallel);

  LandscapeSnapshot snap;
  snap.stress = mds.stress;
  snap.epoch_tag = epoch_tag;
  snap.points.resize(all_states.size());
  for (std::size_t k = 0; k < all_states.size(); ++k) {
    snap.points[k] = {mds.coords[k][0], mds.coords[k][1], classes[k],
                      static_cast<int>(k) / samples_per_image};
  }
  return snap;
}

double cluster_separation(const LandscapeSnapshot& snapshot) {
  double intra = 0.0, inter = 0.0;
  long long n_intra = 0, n_inter = 0;
  const auto& pts = snapshot.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].decoded_class < 0 || pts[j].decoded_class < 0) continue;
      double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      double d = std::sqrt(dx * dx + dy * dy);
      if (pts[i].decoded_class == pts[j].decoded_class) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  }
  if (n_intra == 0 || n_inter == 0) return 0.0;
  double mean_intra = intra / static_cast<double>(n_intra);
  if (mean_intra == 0.0) return std::numeric_limits<double>::infinity();
  return (inter / static_cast<double>(n_inter)) / mean_intra;
}

CompareReport compare_runs(const std::vector<TrainRun>& runs,
                           const std::vector<std::pair<std::string, double>>& reference_rows,
                           int from_epoch, int reference_epoch, bool allow_mixed_datasets) {
  if (runs.size() < 2) throw InsufficientDataError("compare needs at least 2 runs");
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (!allow_mixed_datasets && runs[k].dataset_hash != runs[0].dataset_hash)
      throw ContractError("runs use different datasets (" + runs[0].dataset_hash + " vs " +
                          runs[k].dataset_hash + "); pass --force to compare anyway");
  }

  CompareReport rep;
  rep.reference_epoch = reference_epoch;
  for (const auto& run : runs) {
    MethodSummary s;
    s.method = run.method;
    s.m = run.m;
    std::vector<std::pair<int, double>> train_curve, test_curve;
    for (const auto& r : run.records) {
      train_curve.push_back({r.epoch, r.train_error});
      test_curve.push_back({r.epoch, r.test_error});
    }
    s.train_fit = fit_scaling(train_curve, from_epoch);
    try {
      s.test_fit = fit_scaling(test_curve, from_epoch);
    } catch (const InsufficientDataError&) {
      s.test_fit = ScalingFit{};  // test error may saturate at zero
    }
    rep.methods.push_back(std::move(s));
  }
  for (const auto& [label, z] : reference_rows) {
    MethodSummary s;
    s.method = label;
    s.is_reference = true;
    s.reference_z = z;
    rep.methods.push_back(std::move(s));
  }

  // epochs each run would need to reach run 0's error at the reference epoch
  const auto& base = rep.methods[0].train_fit;
  const double target_log_err = base.log_intercept - base.z * std::log(static_cast<double>(reference_epoch));
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& fit = rep.methods[k].train_fit;
    double multiple = 1.0;
    if (fit.z > 0.0) {
      double log_epochs = (fit.log_intercept - target_log_err) / fit.z;
      multiple = std::exp(log_epochs) / reference_epoch;
    }
    rep.resource_multiples.push_back(multiple);
  }

  std::ostringstream txt;
  txt << "scaling comparison (train-error fits, epochs " << from_epoch << "..end)\n";
  txt << "  method        m     z       r^2     fit-range   resource x@" << reference_epoch << "\n";
  for (std::size_t k = 0; k < rep.methods.size(); ++k) {
    const auto& s = rep.methods[k];
    char line[160];
    if (s.is_reference) {
      std::snprintf(line, sizeof line, "  %-12s  -     %.3f   -       -           (reference)\n",
                    s.method.c_str(), s.reference_z);
    } else {
      std::snprintf(line, sizeof line, "  %-12s  %-4d  %.3f   %.3f   [%d,%d]      %.2f\n",
                    s.method.c_str(), s.m, s.train_fit.z, s.train_fit.r_squared,
                    s.train_fit.first_epoch, s.train_fit.last_epoch,
                    k < rep.resource_multiples.size() ? rep.resource_multiples[k] : 0.0);
    }
    txt << line;
  }
  rep.text = txt.str();
  return rep;
}

std::string render_snapshot_svg(const LandscapeSnapshot& snapshot, int size_px) {
  static const char* palette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#bcbd22", "#17becf", "#7f2704"};
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (std::size_t k = 0; k < snapshot.points.size(); ++k) {
    const auto& p = snapshot.points[k];
    if (k == 0) {
      min_x = max_x = p.x;
      min_y = max_y = p.y;
    }
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double span = std::max(max_x - min_x, max_y - min_y);
  if (span == 0.0) span = 1.0;
  auto sx = [&](double x) { return 20.0 + (x - min_x) / span * (size_px - 40); };
  auto sy = [&](double y) { return 20.0 + (y - min_y) / span * (size_px - 40); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\""
      << size_px << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& p : snapshot.points) {
    const char* color = p.decoded_class >= 0 && p.decoded_class < 10
                            ? palette[p.decoded_class]
                            : "#aaaaaa";  // gray for unclassified
    svg << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"3\" fill=\"" << color
        << "\" fill-opacity=\"0.7\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace spinnet
