#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/rational.hpp"
#include "chronoform/score.hpp"
#include "chronoform/skyline.hpp"

namespace chronoform {

/// Transposition- and tempo-invariant fingerprint of a melody.
struct IntervalProfile {
  std::vector<int> steps;        // pitch[i+1] - pitch[i]
  std::vector<Rational> ratios;  // duration[i+1] / duration[i]

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }

  friend bool operator==(const IntervalProfile&, const IntervalProfile&) = default;
};

inline IntervalProfile interval_profile(const Part& melody) {
  if (melody.empty()) throw PreconditionError("interval profile of an empty melody");
  if (!is_monophonic(melody)) throw PreconditionError("interval profile needs a monophonic melody");
  IntervalProfile p;
  const auto& ev = melody.events;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    p.steps.push_back(ev[i].pitch - ev[i - 1].pitch);
    p.ratios.push_back(ev[i].duration / ev[i - 1].duration);
  }
  return p;
}

struct SimilarityWeights {
  double pitch = 0.7;
  double rhythm = 0.3;

  friend bool operator==(const SimilarityWeights&, const SimilarityWeights&) = default;
};

inline void check_weights(const SimilarityWeights& w) {
  if (w.pitch < 0 || w.rhythm < 0 || std::abs(w.pitch + w.rhythm - 1.0) > 1e-9) {
    throw PreconditionError("similarity weights must be non-negative and sum to 1");
  }
}

/// Unit-cost Levenshtein distance.
template <typename T>
std::size_t edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Similarity from the two raw edit distances; shared with the oracle tests so
/// both routes agree bit for bit once the distances agree.
inline double similarity_from_distances(std::size_t d_steps, std::size_t d_ratios,
                                        std::size_t max_len, const SimilarityWeights& w) {
  if (max_len == 0) return 1.0;
  const double n = static_cast<double>(max_len);
  const double d = w.pitch * (static_cast<double>(d_steps) / n) +
                   w.rhythm * (static_cast<double>(d_ratios) / n);
  return std::clamp(1.0 - d, 0.0, 1.0);
}

inline double similarity(const IntervalProfile& a, const IntervalProfile& b,
                         const SimilarityWeights& w = {}) {
  check_weights(w);
  const std::size_t n = std::max(a.size(), b.size());
  if (n == 0) return 1.0;
  return similarity_from_distances(edit_distance(a.steps, b.steps),
                                   edit_distance(a.ratios, b.ratios), n, w);
}

struct RecurrenceMatch {
  std::size_t occurrence_index = 0;
  int voice = 0;
  Rational start{0};
  Rational end{0};
  std::size_t first_note = 0;  // index into the part's skyline
  std::size_t note_count = 0;
  double similarity = 0;
  double deviation = 1;
};

struct RecurrenceSeries {
  IntervalProfile query;
  std::vector<RecurrenceMatch> matches;
  std::optional<std::size_t> outlier_index;
};

/// Events of every part sounding inside [start, end), merged into one Part.
inline Part excerpt(const Piece& piece, Rational start, Rational end) {
  std::vector<NoteEvent> out;
  for (const auto& p : piece.parts) {
    for (const auto& e : p.events) {
      if (e.onset < end && e.end() > start) out.push_back(e);
    }
  }
  std::stable_sort(out.begin(), out.end(), event_order);
  return Part{0, std::move(out)};
}

/// Windows of the query's length +-50% slide over the skyline of every part;
/// windows scoring at least `threshold` are kept greedily by descending
/// similarity, never overlapping an accepted window of the same part.
inline RecurrenceSeries find_recurrences(const Piece& piece, const Part& query, double threshold,
                                         const SimilarityWeights& weights = {}) {
  check_weights(weights);
  if (!(threshold > 0.0 && threshold <= 1.0)) throw PreconditionError("threshold must lie in (0, 1]");
  if (query.size() < 2) throw PreconditionError("query needs at least 2 notes");

  RecurrenceSeries series;
  series.query = interval_profile(query);
  const std::size_t n = query.size();
  const std::size_t min_len = std::max<std::size_t>(2, n / 2);
  const std::size_t max_len = (3 * n + 1) / 2;

  std::vector<RecurrenceMatch> candidates;
  for (const auto& part : piece.parts) {
    if (part.empty()) continue;
    const Part line = skyline(part);
    for (std::size_t len = min_len; len <= max_len && len <= line.size(); ++len) {
      for (std::size_t i = 0; i + len <= line.size(); ++i) {
        const auto first = line.events.begin() + static_cast<std::ptrdiff_t>(i);
        const Part window{part.voice, std::vector<NoteEvent>(first, first + static_cast<std::ptrdiff_t>(len))};
        const double sim = similarity(interval_profile(window), series.query, weights);
        if (sim < threshold) continue;
        RecurrenceMatch m;
        m.voice = part.voice;
        m.start = window.events.front().onset;
        m.end = window.events.back().end();
        m.first_note = i;
        m.note_count = len;
        m.similarity = sim;
        m.deviation = 1.0 - sim;
        candidates.push_back(m);
      }
    }
  }

  // Ties: length closest to the query, then earlier start, then lower voice.
  auto len_gap = [n](const RecurrenceMatch& m) {
    return m.note_count > n ? m.note_count - n : n - m.note_count;
  };
  std::stable_sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return std::tuple(len_gap(a), a.start, a.voice) < std::tuple(len_gap(b), b.start, b.voice);
  });
  for (const auto& c : candidates) {
    const bool clash = std::any_of(series.matches.begin(), series.matches.end(), [&](const auto& m) {
      return m.voice == c.voice && c.start < m.end && m.start < c.end;
    });
    if (!clash) series.matches.push_back(c);
  }

  std::stable_sort(series.matches.begin(), series.matches.end(), [](const auto& a, const auto& b) {
    return std::tie(a.start, a.voice) < std::tie(b.start, b.voice);
  });
  for (std::size_t i = 0; i < series.matches.size(); ++i) series.matches[i].occurrence_index = i;

  if (series.matches.size() >= 2) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < series.matches.size(); ++i) {
      if (series.matches[i].deviation > series.matches[best].deviation) best = i;
    }
    const double top = series.matches[best].deviation;
    const auto ties = std::count_if(series.matches.begin(), series.matches.end(),
                                    [top](const auto& m) { return m.deviation == top; });
    if (ties == 1) series.outlier_index = best;
  }
  return series;
}

/// Pitch classes (relative to the tonic) accepted as diatonic. Minor admits
/// the raised seventh next to the natural-minor set.
inline std::vector<int> diatonic_set(Mode mode) {
  if (mode == Mode::kMajor) return {0, 2, 4, 5, 7, 9, 11};
  return {0, 2, 3, 5, 7, 8, 10, 11};
}

inline bool is_diatonic(int pitch, const Key& key) {
  const int rel = ((pitch - key.tonic) % 12 + 12) % 12;
  const auto set = diatonic_set(key.mode);
  return std::find(set.begin(), set.end(), rel) != set.end();
}

/// Fraction of notes whose pitch class falls outside the key.
inline double chromaticism_index(const Part& segment, const Key& key) {
  if (segment.empty()) throw PreconditionError("chromaticism index of an empty segment");
  const auto outside = std::count_if(segment.events.begin(), segment.events.end(),
                                     [&](const NoteEvent& e) { return !is_diatonic(e.pitch, key); });
  return static_cast<double>(outside) / static_cast<double>(segment.size());
}

inline double chromaticism_index(const Part& segment, const std::optional<Key>& key) {
  if (!key) {
    throw PreconditionError("no key available: supply one (@key or --key) or run estimate_key");
  }
  return chromaticism_index(segment, *key);
}

/// Duration-weighted overlap of the piece with each of the 24 diatonic sets.
inline std::array<Rational, 24> key_scores(const Piece& piece) {
  std::array<Rational, 12> weight{};
  for (const auto& part : piece.parts) {
    for (const auto& e : part.events) weight[e.pitch % 12] += e.duration;
  }
  std::array<Rational, 24> scores{};
  for (int tonic = 0; tonic < 12; ++tonic) {
    for (int m = 0; m < 2; ++m) {
      for (int rel : diatonic_set(m == 0 ? Mode::kMajor : Mode::kMinor)) {
        scores[tonic * 2 + m] += weight[(tonic + rel) % 12];
      }
    }
  }
  return scores;
}

/// Best-overlap key. Ties go to a tonic matching the opening bass note, then
/// the lower tonic, then major before minor.
inline Key estimate_key(const Piece& piece) {
  if (piece.empty()) throw PreconditionError("key estimation of an empty piece");
  const auto scores = key_scores(piece);
  const int opening = all_events(piece).front().pitch;  // lowest note of the first onset
  std::size_t best = 0;
  auto preferred = [&](std::size_t i) { return static_cast<int>(i / 2) == opening % 12; };
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && preferred(i) && !preferred(best))) {
      best = i;
    }
  }
  return Key{static_cast<int>(best / 2), best % 2 == 0 ? Mode::kMajor : Mode::kMinor};
}

enum class Cadence { kAuthentic, kPlagal, kHalf, kOther };

inline const char* cadence_name(Cadence c) {
  switch (c) {
    case Cadence::kAuthentic: return "authentic";
    case Cadence::kPlagal: return "plagal";
    case Cadence::kHalf: return "half";
    case Cadence::kOther: return "other";
  }
  return "other";
}

/// Root motion between the basses of the last two onset groups, read as scale
/// degrees of `key`. The bass stands in for the chord root.
inline Cadence classify_cadence(const Piece& piece, const Key& key) {
  const auto events = all_events(piece);
  std::vector<Rational> onsets;
  for (const auto& e : events) {
    if (onsets.empty() || onsets.back() != e.onset) onsets.push_back(e.onset);
  }
  if (onsets.size() < 2) throw PreconditionError("cadence undecidable: fewer than two sonorities");

  auto bass_of = [&](Rational t) {
    int lowest = 128;
    int count = 0;
    for (const auto& e : events) {
      if (e.onset == t) {
        lowest = std::min(lowest, e.pitch);
        ++count;
      }
    }
    if (count < 2) throw PreconditionError("cadence undecidable: monophonic close");
    return lowest;
  };
  const int penult = ((bass_of(onsets[onsets.size() - 2]) - key.tonic) % 12 + 12) % 12;
  const int final = ((bass_of(onsets.back()) - key.tonic) % 12 + 12) % 12;

  if (final == 0 && penult == 7) return Cadence::kAuthentic;
  if (final == 0 && penult == 5) return Cadence::kPlagal;
  if (final == 7) return Cadence::kHalf;
  return Cadence::kOther;
}

inline Cadence classify_cadence(const Piece& piece) {
  if (!piece.key) {
    throw PreconditionError("no key available: supply one (@key or --key) or run estimate_key");
  }
  return classify_cadence(piece, *piece.key);
}

}  // namespace chronoform
