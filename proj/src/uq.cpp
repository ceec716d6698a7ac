#include "pnj/uq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "pnj/error.hpp"
#include "pnj/objective.hpp"
#include "pnj/parallel.hpp"

namespace pnj {

namespace {

double crossing(double s0, double v0, double s1, double v1, double level) {
  if (v1 == v0) return 0.5 * (s0 + s1);
  return s0 + (level - v0) * (s1 - s0) / (v1 - v0);
}

}  // namespace

bool half_max_width(std::span<const double> s, std::span<const double> values, double& width) {
  if (s.size() != values.size() || values.size() < 3) return false;
  const std::size_t top = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  const double half = 0.5 * values[top];
  if (!(values[top] > 0.0)) return false;

  std::size_t i = top;
  while (i > 0 && values[i - 1] >= half) --i;
  if (i == 0) return false;
  const double left = crossing(s[i - 1], values[i - 1], s[i], values[i], half);

  std::size_t j = top;
  while (j + 1 < values.size() && values[j + 1] >= half) ++j;
  if (j + 1 == values.size()) return false;
  const double right = crossing(s[j], values[j], s[j + 1], values[j + 1], half);

  width = right - left;
  return width > 0.0;
}

bool transect_fwhm(const Eigen::VectorXd& intensity, const Mesh& mesh, double transect_x, double& width) {
  const double side = mesh.spec().side;
  if (!(transect_x >= 0.0 && transect_x <= side)) return false;
  const double step = 0.5 * mesh.h();
  const auto count = static_cast<std::size_t>(std::floor(side / step + 1e-9)) + 1;
  std::vector<double> s(count);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    s[i] = std::min(side, static_cast<double>(i) * step);
    values[i] = interpolate(intensity, mesh, mesh.locate_physical({transect_x, s[i]}));
  }
  return half_max_width(s, values, width);
}

PnjFeatures extract_features(const ComplexField& total, const Mesh& mesh, const FeatureOptions& options) {
  PnjFeatures f;
  bool found = false;
  Eigen::VectorXd intensity(total.size());
  for (Eigen::Index v = 0; v < total.size(); ++v) {
    intensity[v] = std::norm(total[v]);
    const auto vi = static_cast<std::size_t>(v);
    if (!mesh.physical_support(vi)) continue;
    if (options.exclude_lens && mesh.lens_support(vi)) continue;
    if (!found || intensity[v] > f.peak_value) {
      f.vertex = vi;
      f.peak_value = intensity[v];
      found = true;
    }
  }
  if (!found) throw ConfigError("extract_features: no vertex in the peak search region");
  f.peak = mesh.to_physical(mesh.vertex(f.vertex));
  f.fwhm_defined = transect_fwhm(intensity, mesh, options.transect_x, f.fwhm);
  if (!f.fwhm_defined) f.fwhm = 0.0;
  return f;
}

std::vector<double> UqSummary::values(Feature feature) const {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    switch (feature) {
      case Feature::PeakX: out.push_back(f.peak.x); break;
      case Feature::PeakY: out.push_back(f.peak.y); break;
      case Feature::PeakValue: out.push_back(f.peak_value); break;
      case Feature::Fwhm: out.push_back(f.fwhm); break;
    }
  }
  return out;
}

UqSummary summarize(std::vector<PnjFeatures> features) {
  UqSummary s;
  s.features = std::move(features);
  const auto x = s.values(Feature::PeakX);
  const auto y = s.values(Feature::PeakY);
  const auto value = s.values(Feature::PeakValue);
  s.mean_x = saa_mean(x);
  s.variance_x = saa_variance(x);
  s.mean_y = saa_mean(y);
  s.variance_y = saa_variance(y);
  s.mean_value = saa_mean(value);
  s.variance_value = saa_variance(value);
  return s;
}

UqSummary forward_uq(const HelmholtzAssembler& assembler, const DesignField& tau,
                     std::span<const NoiseRealization> realizations, const FeatureOptions& options,
                     unsigned threads) {
  if (realizations.empty()) throw ConfigError("forward_uq: no realizations");
  const Mesh& mesh = assembler.mesh();
  std::vector<PnjFeatures> features(realizations.size());
  parallel_for(realizations.size(), threads, [&](std::size_t m) {
    try {
      const auto k = wavenumber_field(mesh, assembler.wave(), tau, realizations[m]);
      const ComplexField u = total_field(solve_scattered(assembler.assemble(k)), assembler);
      features[m] = extract_features(u, mesh, options);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "realization " << m << ": " << e.what();
      if (dynamic_cast<const SolverError*>(&e) != nullptr) throw SolverError(msg.str());
      if (dynamic_cast<const ConfigError*>(&e) != nullptr) throw ConfigError(msg.str());
      throw NumericError(msg.str());
    }
  });
  return summarize(std::move(features));
}

std::vector<LocationBin> location_histogram(const UqSummary& summary) {
  std::map<std::size_t, LocationBin> bins;
  for (const auto& f : summary.features) {
    auto& bin = bins[f.vertex];
    bin.vertex = f.vertex;
    bin.location = f.peak;
    ++bin.count;
  }
  std::vector<LocationBin> out;
  out.reserve(bins.size());
  for (const auto& [v, bin] : bins) out.push_back(bin);
  return out;
}

std::vector<ValueBin> value_histogram(std::span<const double> values, std::size_t bins) {
  if (values.empty() || bins == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) return {{lo, hi, values.size()}};
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<ValueBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = lo + static_cast<double>(b) * width;
    out[b].upper = b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width;
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    out[std::min(b, bins - 1)].count += 1;
  }
  return out;
}

}  // namespace pnj
