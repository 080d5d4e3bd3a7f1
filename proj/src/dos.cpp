#include "canopy/dos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "canopy/ensemble.hpp"
#include "canopy/error.hpp"
#include "canopy/resolvent.hpp"

namespace canopy {

using cplx = std::complex<double>;

std::string_view to_string(DosMethod m) {
  switch (m) {
    case DosMethod::mc_canopy: return "mc_canopy";
    case DosMethod::finite_volume_histogram: return "finite_volume_histogram";
    case DosMethod::exact_cauchy: return "exact_cauchy";
  }
  return "unknown";
}

DosEstimate finite_volume_dos(std::span<const std::vector<double>> eigenvalues, std::size_t volume,
                              std::span<const double> bin_edges) {
  if (eigenvalues.empty()) throw ParameterError("finite_volume_dos: empty ensemble");
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()))
    throw ParameterError("finite_volume_dos: need increasing bin edges");
  const std::size_t bins = bin_edges.size() - 1;
  std::vector<std::vector<double>> per(bins);
  for (const auto& ev : eigenvalues) {
    std::vector<double> c(bins, 0.0);
    for (double e : ev) {
      if (e < bin_edges.front() || e >= bin_edges.back()) continue;
      const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), e);
      c[static_cast<std::size_t>(it - bin_edges.begin()) - 1] += 1.0;
    }
    for (std::size_t i = 0; i < bins; ++i) per[i].push_back(c[i]);
  }
  DosEstimate d;
  d.method = DosMethod::finite_volume_histogram;
  for (std::size_t i = 0; i < bins; ++i) {
    const double width = bin_edges[i + 1] - bin_edges[i];
    const double scale = 1.0 / (static_cast<double>(volume) * width);
    const auto e = mean_stderr(per[i]);
    d.energy.push_back(0.5 * (bin_edges[i] + bin_edges[i + 1]));
    d.density.push_back(e.mean * scale);
    d.stderr_.push_back(e.stderr_ * scale);
  }
  return d;
}

Estimate finite_volume_dos(std::span<const std::vector<double>> eigenvalues, std::size_t volume,
                           const std::function<double(double)>& F) {
  if (eigenvalues.empty()) throw ParameterError("finite_volume_dos: empty ensemble");
  std::vector<double> vals;
  for (const auto& ev : eigenvalues) {
    double s = 0.0;
    for (double e : ev) s += F(e);
    vals.push_back(s / static_cast<double>(volume));
  }
  return mean_stderr(vals);
}

Estimate finite_volume_stieltjes(const DisorderLaw& law, int K, double b, int L, cplx z,
                                 std::size_t realizations, std::uint64_t seed) {
  if (!(z.imag() > 0.0)) throw ParameterError("finite_volume_stieltjes: Im z must be > 0");
  auto g = std::make_shared<const TreeGraph>(build_regular_tree(K, L));
  const double vol = static_cast<double>(g->vertex_count());
  const auto vals = map_realizations(realizations, [&](std::size_t r) {
    return resolvent_trace(sample_operator(g, law, b, seed, r), z).imag() / vol;
  });
  return mean_stderr(vals);
}

double layer_weight(int K, int L, int n) {
  if (n < 0 || n > L) throw ParameterError("layer_weight: n must lie in [0, L]");
  return std::pow(static_cast<double>(K), L - n) / static_cast<double>(regular_tree_size(K, L));
}

double canopy_weight(int K, int n) {
  return (K - 1.0) / K * std::pow(static_cast<double>(K), -n);
}

double layer_dos(std::span<const EigenSystem> ensemble, const TreeGraph& g, int n,
                 const std::function<double(double)>& F) {
  if (n < 0 || n > g.depth_parameter()) throw ParameterError("layer_dos: n must lie in [0, L]");
  if (ensemble.empty()) throw ParameterError("layer_dos: empty ensemble");
  const auto layer = g.layer(n);
  double total = 0.0;
  for (const auto& e : ensemble) {
    if (!e.has_vectors()) throw ParameterError("layer_dos needs eigenvectors");
    double s = 0.0;
    for (std::size_t k = 0; k < e.n; ++k) {
      const double f = F(e.values[k]);
      double w = 0.0;
      for (Vertex x : layer) w += e.component(k, x) * e.component(k, x);
      s += f * w;
    }
    total += s / static_cast<double>(layer.size());
  }
  return total / static_cast<double>(ensemble.size());
}

DosEstimate canopy_dos_mc(const DisorderLaw& law, const CanopyDosParams& p, std::span<const double> grid,
                          std::size_t realizations, std::uint64_t seed) {
  if (!(p.eta > 0.0)) throw ParameterError("canopy_dos_mc: eta must be > 0");
  if (p.n_max < 0 || p.n_max > p.depth) throw ParameterError("canopy_dos_mc: need 0 <= n_max <= D");
  if (realizations == 0) throw ParameterError("canopy_dos_mc: realizations must be >= 1");
  auto g = std::make_shared<const TreeGraph>(build_canopy_truncation(p.K, p.depth, p.b));
  const auto ray = g->leftmost_ray();  // ray[j] has depth j, hence layer D - j
  const std::size_t m = grid.size();
  std::vector<cplx> z(m);
  for (std::size_t j = 0; j < m; ++j) z[j] = {grid[j], p.eta};
  const int nl = p.n_max + 1;

  // Per realization: Im G(x_n, x_n; z_j) for n = 0..n_max, layer-major.
  const auto samples = map_realizations(realizations, [&](std::size_t r) {
    const auto op = sample_operator(g, law, p.b, seed, r);
    const auto gam = compute_gammas(op, z);
    std::vector<double> out(static_cast<std::size_t>(nl) * m);
    std::vector<cplx> s(m, 0.0);  // parent-side self-energy along the ray
    for (std::size_t j = 0; j < ray.size(); ++j) {
      const Vertex v = ray[j];
      const int layer = p.depth - static_cast<int>(j);
      const Vertex next = j + 1 < ray.size() ? ray[j + 1] : kNoParent;
      for (std::size_t e = 0; e < m; ++e) {
        cplx children = 0.0, siblings_of_next = 0.0;
        for (Vertex c = g->child_begin(v); c < g->child_end(v); ++c) {
          children += gam.at(c, e);
          if (c != next) siblings_of_next += gam.at(c, e);
        }
        const cplx base = op.diagonal[v] - z[e] - s[e];
        if (layer <= p.n_max) {
          const cplx G = 1.0 / (base - children);
          out[static_cast<std::size_t>(layer) * m + e] = G.imag();
        }
        if (next != kNoParent) s[e] = 1.0 / (base - siblings_of_next);
      }
    }
    return out;
  });

  DosEstimate d;
  d.method = DosMethod::mc_canopy;
  d.eta = p.eta;
  d.energy.assign(grid.begin(), grid.end());
  d.layer_density.assign(static_cast<std::size_t>(nl), std::vector<double>(m));
  std::vector<double> combined(realizations);
  for (std::size_t e = 0; e < m; ++e) {
    for (std::size_t r = 0; r < realizations; ++r) {
      double acc = 0.0;
      for (int n = 0; n < nl; ++n)
        acc += canopy_weight(p.K, n) * samples[r][static_cast<std::size_t>(n) * m + e] / std::numbers::pi;
      combined[r] = acc;
    }
    const auto est = mean_stderr(combined);
    d.density.push_back(est.mean);
    d.stderr_.push_back(est.stderr_);
    for (int n = 0; n < nl; ++n) {
      double acc = 0.0;
      for (std::size_t r = 0; r < realizations; ++r) acc += samples[r][static_cast<std::size_t>(n) * m + e];
      d.layer_density[static_cast<std::size_t>(n)][e] = acc / static_cast<double>(realizations) / std::numbers::pi;
    }
  }
  // Each omitted layer density is bounded by ||rho||_inf; the omitted weights sum to K^{-(n_max+1)}.
  d.tail_bound = law.family() == LawFamily::constant
                     ? std::pow(static_cast<double>(p.K), -(p.n_max + 1)) / (std::numbers::pi * p.eta)
                     : std::pow(static_cast<double>(p.K), -(p.n_max + 1)) * law.density_sup();
  return d;
}

std::vector<cplx> canopy_layer_green(int K, double c, double b, cplx z, std::optional<int> depth, int n_max,
                                     double tol) {
  if (!(z.imag() > 0.0)) throw ParameterError("canopy_layer_green: Im z must be > 0");
  if (n_max < 0 || (depth && (*depth < n_max))) throw ParameterError("canopy_layer_green: need 0 <= n_max <= D");
  const double Kd = static_cast<double>(K);
  constexpr int kMaxLayers = 10'000'000;

  // Forward values g_m, layer 0 = boundary.
  std::vector<cplx> g{1.0 / (c + b - z)};
  int top = depth ? *depth : -1;
  for (int m = 1; depth ? m <= top : true; ++m) {
    g.push_back(1.0 / (c - z - Kd * g.back()));
    if (!depth && m > n_max && std::abs(g[m] - g[m - 1]) < tol * std::abs(g[m])) {
      top = m;
      break;
    }
    if (m > kMaxLayers) throw ConvergenceError("canopy_layer_green: forward recursion did not settle");
  }

  // Parent-side self-energy at the top layer.
  cplx S = 0.0;
  if (!depth) {
    const cplx sib = (Kd - 1.0) * g[top];
    for (int it = 0;; ++it) {
      const cplx next = 1.0 / (c - z - S - sib);
      if (std::abs(next - S) < tol * std::abs(next)) {
        S = next;
        break;
      }
      S = next;
      if (it > kMaxLayers) throw ConvergenceError("canopy_layer_green: closure did not converge");
    }
  }
  std::vector<cplx> out(static_cast<std::size_t>(n_max) + 1);
  for (int m = top; m >= 0; --m) {
    if (m <= n_max) out[static_cast<std::size_t>(m)] = 1.0 / (1.0 / g[m] - S);
    if (m > 0) S = 1.0 / (c - z - S - (Kd - 1.0) * g[m - 1]);
  }
  return out;
}

DosEstimate canopy_dos_exact_cauchy(int K, double c, double gamma, double b, std::span<const double> grid,
                                    double eta, std::optional<int> depth, int n_max, double tol) {
  if (!(gamma > 0.0)) throw ParameterError("canopy_dos_exact_cauchy: gamma must be > 0");
  if (eta < 0.0) throw ParameterError("canopy_dos_exact_cauchy: eta must be >= 0");
  DosEstimate d;
  d.method = DosMethod::exact_cauchy;
  d.eta = eta;
  d.energy.assign(grid.begin(), grid.end());
  d.layer_density.assign(static_cast<std::size_t>(n_max) + 1, std::vector<double>(grid.size()));
  for (std::size_t e = 0; e < grid.size(); ++e) {
    const auto G = canopy_layer_green(K, c, b, {grid[e], eta + gamma}, depth, n_max, tol);
    double acc = 0.0;
    for (int n = 0; n <= n_max; ++n) {
      const double ld = G[static_cast<std::size_t>(n)].imag() / std::numbers::pi;
      d.layer_density[static_cast<std::size_t>(n)][e] = ld;
      acc += canopy_weight(K, n) * ld;
    }
    d.density.push_back(acc);
    d.stderr_.push_back(0.0);
  }
  d.tail_bound = std::pow(static_cast<double>(K), -(n_max + 1)) / (std::numbers::pi * gamma);
  return d;
}

BetheAverage bethe_average(std::span<const double> F, int K) {
  if (F.size() < 2) throw ParameterError("bethe_average needs at least two consecutive L values");
  BetheAverage out;
  for (std::size_t i = 1; i < F.size(); ++i) out.sequence.push_back((F[i] - K * F[i - 1]) / 2.0);
  out.value = out.sequence.back();
  return out;
}

void write_dos_csv(std::ostream& out, const DosEstimate& d, bool header) {
  const auto old = out.precision(17);
  if (header) out << "energy,density,stderr,method,eta\n";
  for (std::size_t i = 0; i < d.energy.size(); ++i)
    out << d.energy[i] << ',' << d.density[i] << ',' << d.stderr_[i] << ',' << to_string(d.method) << ','
        << d.eta << '\n';
  out.precision(old);
}

}  // namespace canopy
