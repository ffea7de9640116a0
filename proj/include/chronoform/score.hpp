#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/rational.hpp"

namespace chronoform {

enum class Mode { kMajor, kMinor };

/// Tonic pitch class (0 = C) and mode.
struct Key {
  int tonic = 0;
  Mode mode = Mode::kMajor;

  friend bool operator==(const Key&, const Key&) = default;
};

struct NoteEvent {
  Rational onset{0};
  Rational duration{1};
  int pitch = 60;
  int velocity = 64;
  int voice = 0;

  Rational end() const { return onset + duration; }

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

/// Returns an empty string when the event is valid, otherwise the violated constraint.
inline std::string check_event(const NoteEvent& e) {
  if (e.duration <= 0) return "non-positive duration";
  if (e.onset < 0) return "negative onset";
  if (e.pitch < 0 || e.pitch > 127) return "pitch out of range 0-127";
  if (e.velocity < 1 || e.velocity > 127) return "velocity out of range 1-127";
  return {};
}

/// (onset, pitch) ordering used inside every Part.
inline bool event_order(const NoteEvent& a, const NoteEvent& b) {
  return std::tie(a.onset, a.pitch) < std::tie(b.onset, b.pitch);
}

struct Part {
  int voice = 0;
  std::vector<NoteEvent> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }

  Rational end() const {
    Rational end{0};
    for (const auto& e : events) end = std::max(end, e.end());
    return end;
  }

  friend bool operator==(const Part&, const Part&) = default;
};

/// Builds a Part, validating every event and restoring the (onset, pitch) order.
inline Part make_part(int voice, std::vector<NoteEvent> events) {
  for (auto& e : events) {
    if (auto err = check_event(e); !err.empty()) throw PreconditionError(err);
    e.voice = voice;
  }
  std::stable_sort(events.begin(), events.end(), event_order);
  return Part{voice, std::move(events)};
}

struct Piece {
  std::vector<Part> parts;  // ascending voice id
  std::optional<Key> key;
  std::string title;

  /// Maximum event end over all parts; 0 for an empty piece.
  Rational beats_total() const {
    Rational total{0};
    for (const auto& p : parts) total = std::max(total, p.end());
    return total;
  }

  std::size_t event_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.size();
    return n;
  }

  bool empty() const { return event_count() == 0; }

  friend bool operator==(const Piece&, const Piece&) = default;
};

/// Groups events into parts by their voice field.
inline Piece make_piece(std::vector<NoteEvent> events, std::optional<Key> key = std::nullopt,
                        std::string title = {}) {
  std::map<int, std::vector<NoteEvent>> by_voice;
  for (auto& e : events) by_voice[e.voice].push_back(e);
  Piece piece;
  piece.key = key;
  piece.title = std::move(title);
  for (auto& [voice, evs] : by_voice) piece.parts.push_back(make_part(voice, std::move(evs)));
  return piece;
}

/// All events of the piece, in (onset, pitch) order.
inline std::vector<NoteEvent> all_events(const Piece& piece) {
  std::vector<NoteEvent> out;
  for (const auto& p : piece.parts) out.insert(out.end(), p.events.begin(), p.events.end());
  std::stable_sort(out.begin(), out.end(), event_order);
  return out;
}

inline Part transpose(const Part& part, int semitones) {
  Part out = part;
  for (auto& e : out.events) e.pitch += semitones;
  for (const auto& e : out.events) {
    if (e.pitch < 0 || e.pitch > 127) throw PreconditionError("transposition leaves MIDI range");
  }
  return out;
}

/// Mirror image in time: an event on [s, e) maps to [T - e, T - s) with T = beats_total.
inline Piece time_reversed(const Piece& piece) {
  const Rational total = piece.beats_total();
  Piece out;
  out.key = piece.key;
  out.title = piece.title;
  for (const auto& part : piece.parts) {
    std::vector<NoteEvent> events = part.events;
    for (auto& e : events) e.onset = total - e.end();
    out.parts.push_back(make_part(part.voice, std::move(events)));
  }
  return out;
}

/// True when no two events overlap in time.
inline bool is_monophonic(const Part& part) {
  Rational reach{0};
  for (std::size_t i = 0; i < part.events.size(); ++i) {
    if (i > 0 && part.events[i].onset < reach) return false;
    reach = std::max(reach, part.events[i].end());
  }
  return true;
}

}  // namespace chronoform
