#pragma once

// Reader and writer for the line-oriented ".notes" score format:
//
//   # comment
//   @title Wenn ich einmal soll scheiden
//   @key A minor
//   <onset> <duration> <pitch> [velocity] [voice]
//
// Onsets and durations are integers or fractions "p/q" in beats.

#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/rational.hpp"
#include "chronoform/score.hpp"

namespace chronoform {

inline constexpr std::array<const char*, 12> kPitchClassNames = {
    "C", "C#", "D", "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B"};

inline std::string key_name(const Key& key) {
  return std::string(kPitchClassNames[key.tonic]) + (key.mode == Mode::kMajor ? " major" : " minor");
}

/// "C", "F#", "Bb", "Cb", ... to a pitch class.
inline std::optional<int> parse_tonic(std::string_view s) {
  if (s.empty() || s.size() > 2) return std::nullopt;
  static constexpr int kNatural[] = {9, 11, 0, 2, 4, 5, 7};  // A..G
  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (letter < 'A' || letter > 'G') return std::nullopt;
  int pc = kNatural[letter - 'A'];
  if (s.size() == 2) {
    if (s[1] == '#') {
      pc += 1;
    } else if (s[1] == 'b') {
      pc += 11;
    } else {
      return std::nullopt;
    }
  }
  return pc % 12;
}

/// "<tonic> <major|minor>"
inline std::optional<Key> parse_key(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string tonic, mode, extra;
  if (!(in >> tonic >> mode) || (in >> extra)) return std::nullopt;
  auto pc = parse_tonic(tonic);
  if (!pc) return std::nullopt;
  if (mode == "major") return Key{*pc, Mode::kMajor};
  if (mode == "minor") return Key{*pc, Mode::kMinor};
  return std::nullopt;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::optional<int> parse_int(std::string_view s) {
  auto r = parse_rational(s);
  if (!r || r->denominator() != 1) return std::nullopt;
  if (r->numerator() < -1000000 || r->numerator() > 1000000) return std::nullopt;
  return static_cast<int>(r->numerator());
}

}  // namespace detail

inline Piece parse_text(std::string_view source) {
  std::vector<NoteEvent> events;
  std::optional<Key> key;
  std::string title;
  std::set<std::string> seen_meta;

  std::size_t line_no = 0;
  while (!source.empty()) {
    ++line_no;
    const auto nl = source.find('\n');
    std::string_view line = source.substr(0, nl);
    source.remove_prefix(nl == std::string_view::npos ? source.size() : nl + 1);
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '@') {
      const auto sp = line.find_first_of(" \t");
      const std::string name(line.substr(1, sp == std::string_view::npos ? line.npos : sp - 1));
      const std::string_view value =
          sp == std::string_view::npos ? std::string_view{} : detail::trim(line.substr(sp));
      if (!seen_meta.insert(name).second) throw ParseError("duplicate metadata @" + name, line_no);
      if (name == "key") {
        key = parse_key(value);
        if (!key) throw ParseError("malformed @key (expected '<tonic> <major|minor>')", line_no);
      } else if (name == "title") {
        title = std::string(value);
      } else {
        throw ParseError("unknown metadata @" + name, line_no);
      }
      continue;
    }

    std::vector<std::string> fields;
    std::istringstream in{std::string(line)};
    for (std::string f; in >> f;) fields.push_back(f);
    if (fields.size() < 3 || fields.size() > 5) {
      throw ParseError("expected 3 to 5 fields, got " + std::to_string(fields.size()), line_no);
    }

    NoteEvent e;
    auto onset = parse_rational(fields[0]);
    auto duration = parse_rational(fields[1]);
    auto pitch = detail::parse_int(fields[2]);
    if (!onset) throw ParseError("non-numeric onset '" + fields[0] + "'", line_no);
    if (!duration) throw ParseError("non-numeric duration '" + fields[1] + "'", line_no);
    if (!pitch) throw ParseError("non-numeric pitch '" + fields[2] + "'", line_no);
    e.onset = *onset;
    e.duration = *duration;
    e.pitch = *pitch;
    if (fields.size() > 3) {
      auto v = detail::parse_int(fields[3]);
      if (!v) throw ParseError("non-numeric velocity '" + fields[3] + "'", line_no);
      e.velocity = *v;
    }
    if (fields.size() > 4) {
      auto v = detail::parse_int(fields[4]);
      if (!v || *v < 0) throw ParseError("malformed voice '" + fields[4] + "'", line_no);
      e.voice = *v;
    }
    if (auto err = check_event(e); !err.empty()) throw ParseError(err, line_no);
    events.push_back(e);
  }
  return make_piece(std::move(events), key, std::move(title));
}

/// Writes the canonical form; parse_text(serialize_text(p)) == p.
inline std::string serialize_text(const Piece& piece) {
  std::ostringstream out;
  if (!piece.title.empty()) out << "@title " << piece.title << '\n';
  if (piece.key) out << "@key " << key_name(*piece.key) << '\n';
  for (const auto& part : piece.parts) {
    for (const auto& e : part.events) {
      out << to_string(e.onset) << ' ' << to_string(e.duration) << ' ' << e.pitch << ' '
          << e.velocity << ' ' << part.voice << '\n';
    }
  }
  return out.str();
}

}  // namespace chronoform
