#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/rational.hpp"
#include "chronoform/score.hpp"

namespace chronoform {

/// Convex weights of the three salience proxies.
struct SalienceWeights {
  double pitch = 0.4;
  double density = 0.3;
  double velocity = 0.3;

  friend bool operator==(const SalienceWeights&, const SalienceWeights&) = default;
};

struct CurveSample {
  Rational time{0};
  double salience = 0;
};

using SalienceCurve = std::vector<CurveSample>;

struct ClimaxProfile {
  SalienceCurve curve;
  Rational beats_total{0};
  Rational peak_time{0};
  double normalized_position = 0;  // peak_time / beats_total
  double asymmetry_index = 0;      // 2 * normalized_position - 1
  double pre_mass_fraction = 0;    // salience mass strictly before the peak
};

inline void check_weights(const SalienceWeights& w) {
  if (w.pitch < 0 || w.density < 0 || w.velocity < 0 ||
      std::abs(w.pitch + w.density + w.velocity - 1.0) > 1e-9) {
    throw PreconditionError("salience weights must be non-negative and sum to 1");
  }
}

/// Samples the piece every window/2 beats from 0 to beats_total (the end is
/// always sampled). Each sample reads the window of width `window` centred on
/// it:
///   pitch    duration-weighted mean sounding pitch over the piece's pitch range
///   density  onset count over the largest windowed onset count
///   velocity duration-weighted mean velocity over the piece's loudest velocity
inline SalienceCurve salience_curve(const Piece& piece, const SalienceWeights& weights = {},
                                    Rational window = Rational(4)) {
  check_weights(weights);
  if (window <= 0) throw PreconditionError("salience window must be positive");
  if (piece.empty()) throw PreconditionError("salience curve of an empty piece");
  const Rational total = piece.beats_total();
  if (total <= 0) throw PreconditionError("salience curve of a zero-duration piece");

  const auto events = all_events(piece);
  int low = 127, high = 0, loudest = 1;
  for (const auto& e : events) {
    low = std::min(low, e.pitch);
    high = std::max(high, e.pitch);
    loudest = std::max(loudest, e.velocity);
  }

  const Rational hop = window / 2;
  std::vector<Rational> times;
  for (Rational t{0}; t <= total; t += hop) times.push_back(t);
  if (times.back() < total) times.push_back(total);

  struct Reading {
    Rational pitch{0};
    Rational velocity{0};
    int onsets = 0;
  };
  std::vector<Reading> readings(times.size());
  int max_onsets = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Rational lo = times[k] - hop;
    const Rational hi = times[k] + hop;
    Rational sounding{0}, pitch_mass{0}, vel_mass{0};
    for (const auto& e : events) {
      if (e.onset >= lo && e.onset < hi) ++readings[k].onsets;
      const Rational overlap = std::min(e.end(), hi) - std::max(e.onset, lo);
      if (overlap <= 0) continue;
      sounding += overlap;
      pitch_mass += overlap * e.pitch;
      vel_mass += overlap * e.velocity;
    }
    if (sounding > 0) {
      readings[k].pitch = high == low ? Rational(1) : (pitch_mass / sounding - low) / (high - low);
      readings[k].velocity = vel_mass / sounding / loudest;
    }
    max_onsets = std::max(max_onsets, readings[k].onsets);
  }

  SalienceCurve curve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double density =
        max_onsets == 0 ? 0.0 : static_cast<double>(readings[k].onsets) / max_onsets;
    curve[k].time = times[k];
    curve[k].salience = weights.pitch * to_double(readings[k].pitch) +
                        weights.density * density +
                        weights.velocity * to_double(readings[k].velocity);
  }
  return curve;
}

/// Peak of the curve (earliest sample on ties) and the asymmetry statistics.
/// The curve's last sample time is taken as the piece length.
inline ClimaxProfile locate_climax(SalienceCurve curve) {
  if (curve.empty()) throw PreconditionError("climax of an empty curve");
  const Rational total = curve.back().time;
  if (total <= 0) throw PreconditionError("climax of a curve spanning zero time");

  std::size_t peak = 0;
  double mass = 0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (curve[k].salience < 0) throw PreconditionError("negative salience");
    if (curve[k].salience > curve[peak].salience) peak = k;
    mass += curve[k].salience;
  }
  if (curve[peak].salience <= 0) throw PreconditionError("no salience content");

  double before = 0;
  for (std::size_t k = 0; k < curve.size() && curve[k].time < curve[peak].time; ++k) {
    before += curve[k].salience;
  }

  ClimaxProfile profile;
  profile.beats_total = total;
  profile.peak_time = curve[peak].time;
  const Rational position = profile.peak_time / total;
  profile.normalized_position = to_double(position);
  profile.asymmetry_index = to_double(2 * position - 1);
  profile.pre_mass_fraction = std::clamp(before / mass, 0.0, 1.0);
  profile.curve = std::move(curve);
  return profile;
}

inline ClimaxProfile analyze_climax(const Piece& piece, const SalienceWeights& weights = {},
                                    Rational window = Rational(4)) {
  return locate_climax(salience_curve(piece, weights, window));
}

/// "time,salience" CSV with a header row and LF line endings.
inline std::string curve_csv(const SalienceCurve& curve) {
  std::string out = "time,salience\n";
  char buf[96];
  for (const auto& s : curve) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", to_double(s.time), s.salience);
    out += buf;
  }
  return out;
}

}  // namespace chronoform
