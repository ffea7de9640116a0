#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/score.hpp"

namespace chronoform {

namespace detail {

// Highest pitch first; at equal pitch the earlier-starting event wins.
struct SkylinePriority {
  const std::vector<NoteEvent>* events;
  bool operator()(std::size_t a, std::size_t b) const {
    const auto& x = (*events)[a];
    const auto& y = (*events)[b];
    if (x.pitch != y.pitch) return x.pitch > y.pitch;
    if (x.onset != y.onset) return x.onset < y.onset;
    return a < b;
  }
};

inline Part skyline_of(std::vector<NoteEvent> events, int voice) {
  std::stable_sort(events.begin(), events.end(), event_order);
  std::vector<Rational> onsets;
  for (const auto& e : events) {
    if (onsets.empty() || onsets.back() != e.onset) onsets.push_back(e.onset);
  }

  // Winner at each distinct onset, from a sweep over an ordered active set.
  std::set<std::size_t, SkylinePriority> active(SkylinePriority{&events});
  std::vector<std::size_t> winner(onsets.size());
  std::size_t next = 0;
  for (std::size_t k = 0; k < onsets.size(); ++k) {
    const Rational t = onsets[k];
    while (next < events.size() && events[next].onset == t) active.insert(next++);
    for (auto it = active.begin(); it != active.end();) {
      it = events[*it].end() <= t ? active.erase(it) : std::next(it);
    }
    winner[k] = *active.begin();
  }

  // A run of onsets won by the same event becomes one output note, cut at the
  // first onset won by someone else.
  Part out;
  out.voice = voice;
  for (std::size_t k = 0; k < onsets.size();) {
    std::size_t j = k;
    while (j + 1 < onsets.size() && winner[j + 1] == winner[k]) ++j;
    const NoteEvent& src = events[winner[k]];
    Rational end = src.end();
    if (j + 1 < onsets.size()) end = std::min(end, onsets[j + 1]);
    NoteEvent e = src;
    e.onset = onsets[k];
    e.duration = end - onsets[k];
    e.voice = voice;
    out.events.push_back(e);
    k = j + 1;
  }
  return out;
}

}  // namespace detail

/// Monophonic top line of one part.
inline Part skyline(const Part& part) {
  if (part.empty()) throw PreconditionError("skyline of an empty part");
  return detail::skyline_of(part.events, part.voice);
}

/// Monophonic top line across all parts: at every onset the highest sounding
/// pitch wins; lower notes overlapping it are truncated or dropped.
inline Part skyline(const Piece& piece) {
  if (piece.empty()) throw PreconditionError("skyline of an empty piece");
  return detail::skyline_of(all_events(piece), piece.parts.front().voice);
}

}  // namespace chronoform
