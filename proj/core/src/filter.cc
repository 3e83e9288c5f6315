/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hemi/filter.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "hemi/error.h"

namespace hemi::signal {
namespace {

using cd = std::complex<double>;

constexpr double kRealPoleTolerance = 1e-12;

Biquad section_from_poles(cd p1, cd p2) {
  // (1 - p1 z^-1)(1 - p2 z^-1) with a conjugate or real pair.
  Biquad s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  s.a1 = -(p1 + p2).real();
  s.a2 = (p1 * p2).real();
  return s;
}

// Steady-state section states for a unit step input, chained through the
// cascade.
std::vector<std::array<double, 2>> step_states(const std::vector<Biquad>& sos) {
  std::vector<std::array<double, 2>> zi(sos.size());
  double level = 1.0;
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const Biquad& s = sos[i];
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y = gain * level;
    const double s2 = s.b2 * level - s.a2 * y;
    const double s1 = s.b1 * level - s.a1 * y + s2;
    zi[i] = {s1, s2};
    level = y;
  }
  return zi;
}

void run_cascade(std::vector<double>& x, const std::vector<Biquad>& sos,
                 const std::vector<std::array<double, 2>>& zi, double x0) {
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const Biquad& s = sos[k];
    double s1 = zi[k][0] * x0;
    double s2 = zi[k][1] * x0;
    for (double& v : x) {
      const double in = v;
      const double y = s.b0 * in + s1;
      s1 = s.b1 * in - s.a1 * y + s2;
      s2 = s.b2 * in - s.a2 * y;
      v = y;
    }
  }
}

}  // namespace

BandDefinition band_definition(Band band) {
  switch (band) {
    case Band::kDelta: return {"delta", 1.0, 4.0};
    case Band::kTheta: return {"theta", 5.0, 8.0};
    case Band::kAlpha: return {"alpha", 9.0, 12.0};
    case Band::kBeta: return {"beta", 13.0, 30.0};
    case Band::kGamma: return {"gamma", 31.0, 45.0};
  }
  throw ValidationError("unknown band");
}

std::string_view band_name(Band band) {
  switch (band) {
    case Band::kDelta: return "delta";
    case Band::kTheta: return "theta";
    case Band::kAlpha: return "alpha";
    case Band::kBeta: return "beta";
    case Band::kGamma: return "gamma";
  }
  return "unknown";
}

Band parse_band(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (Band b : kAllBands) {
    if (band_name(b) == n) return b;
  }
  throw ValidationError("unknown band '" + std::string(name) + "'");
}

FilterSpec design_bandpass(Band band, double sample_rate, int order,
                           bool zero_phase) {
  return design_bandpass(band_definition(band), sample_rate, order, zero_phase);
}

FilterSpec design_bandpass(const BandDefinition& band, double sample_rate,
                           int order, bool zero_phase) {
  const double nyquist = sample_rate / 2.0;
  if (!(sample_rate > 0.0)) throw ValidationError("sample rate must be > 0");
  if (order < 2 || order % 2 != 0) {
    throw ValidationError("band-pass order must be an even count >= 2");
  }
  if (!(band.low_hz > 0.0 && band.low_hz < band.high_hz)) {
    throw ValidationError("band '" + band.name + "' needs 0 < low < high");
  }
  if (band.high_hz >= nyquist) {
    throw ValidationError("band '" + band.name + "' upper edge " +
                          std::to_string(band.high_hz) +
                          " Hz is not below the Nyquist frequency " +
                          std::to_string(nyquist) + " Hz");
  }

  const int proto = order / 2;
  const double fs2 = 2.0 * sample_rate;
  const double w_lo = fs2 * std::tan(std::numbers::pi * band.low_hz / sample_rate);
  const double w_hi = fs2 * std::tan(std::numbers::pi * band.high_hz / sample_rate);
  const double w0 = std::sqrt(w_lo * w_hi);
  double bw = w_hi - w_lo;
  if (zero_phase) {
    // |H|^4 = 1/2 at the prototype frequency (sqrt(2) - 1)^(1/(2N)).
    bw /= std::pow(std::numbers::sqrt2 - 1.0, 1.0 / (2.0 * proto));
  }

  std::vector<cd> digital_poles;
  cd denom_product = 1.0;
  for (int m = -proto + 1; m < proto; m += 2) {
    const cd p = -std::exp(cd(0.0, std::numbers::pi * m / (2.0 * proto)));
    const cd half = p * bw / 2.0;
    const cd disc = std::sqrt(half * half - w0 * w0);
    for (const cd analog : {half + disc, half - disc}) {
      denom_product *= fs2 - analog;
      digital_poles.push_back((fs2 + analog) / (fs2 - analog));
    }
  }
  const double gain =
      (std::pow(bw, proto) * std::pow(fs2, proto) / denom_product).real();

  std::vector<cd> upper, real_poles;
  for (const cd& p : digital_poles) {
    if (std::abs(p) >= 1.0) {
      throw ValidationError("band-pass design for '" + band.name +
                            "' is unstable");
    }
    if (std::abs(p.imag()) <= kRealPoleTolerance) {
      real_poles.push_back(cd(p.real(), 0.0));
    } else if (p.imag() > 0.0) {
      upper.push_back(p);
    }
  }
  FilterSpec spec{band, sample_rate, order, zero_phase, {}};
  for (const cd& p : upper) spec.sections.push_back(section_from_poles(p, std::conj(p)));
  std::sort(real_poles.begin(), real_poles.end(),
            [](const cd& a, const cd& b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    spec.sections.push_back(section_from_poles(real_poles[i], real_poles[i + 1]));
  }
  if (spec.sections.size() != static_cast<std::size_t>(proto)) {
    throw ValidationError("band-pass design produced an unpaired pole");
  }
  spec.sections.front().b0 *= gain;
  spec.sections.front().b1 *= gain;
  spec.sections.front().b2 *= gain;
  return spec;
}

std::complex<double> frequency_response(const FilterSpec& spec, double hz) {
  const double w = 2.0 * std::numbers::pi * hz / spec.sample_rate;
  const cd z1 = std::exp(cd(0.0, -w));
  const cd z2 = z1 * z1;
  cd h = 1.0;
  for (const Biquad& s : spec.sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

double effective_gain(const FilterSpec& spec, double hz) {
  const double g = std::abs(frequency_response(spec, hz));
  return spec.zero_phase ? g * g : g;
}

std::vector<double> apply_filter(std::span<const double> signal,
                                 const FilterSpec& spec) {
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (!std::isfinite(signal[i])) {
      throw NumericError("non-finite sample at index " + std::to_string(i));
    }
  }
  if (signal.empty()) return {};
  const auto zi = step_states(spec.sections);

  if (!spec.zero_phase) {
    std::vector<double> out(signal.begin(), signal.end());
    run_cascade(out, spec.sections, zi, signal.front());
    return out;
  }

  const std::size_t n = signal.size();
  const std::size_t pad =
      std::min<std::size_t>(3 * static_cast<std::size_t>(spec.order), n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    ext.push_back(2.0 * signal[0] - signal[pad - i]);
  }
  ext.insert(ext.end(), signal.begin(), signal.end());
  for (std::size_t i = 0; i < pad; ++i) {
    ext.push_back(2.0 * signal[n - 1] - signal[n - 2 - i]);
  }

  run_cascade(ext, spec.sections, zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  run_cascade(ext, spec.sections, zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

}  // namespace hemi::signal
