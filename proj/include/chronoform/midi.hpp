#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chronoform/error.hpp"
#include "chronoform/rational.hpp"
#include "chronoform/score.hpp"

namespace chronoform {

namespace detail {

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t peek() const {
    need(1);
    return bytes_[pos_];
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t be(int n) {
    need(static_cast<std::size_t>(n));
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }
  /// SMF variable-length quantity, at most four bytes.
  std::uint32_t vlq() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7f);
      if (!(b & 0x80)) return v;
    }
    throw ParseError("midi: variable-length quantity longer than 4 bytes");
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("midi: truncated chunk");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct OpenNote {
  std::uint64_t tick;
  int velocity;
};

inline std::vector<NoteEvent> read_track(std::span<const std::uint8_t> data, int division,
                                         int track_index, std::vector<std::string>& warnings) {
  ByteReader in(data);
  std::vector<NoteEvent> events;
  // (channel, key) -> pending note-ons, closed first-in first-out.
  std::map<std::pair<int, int>, std::deque<OpenNote>> open;
  std::uint64_t tick = 0;
  std::uint8_t running = 0;
  const std::string where = "midi track " + std::to_string(track_index);

  auto close = [&](int channel, int key, std::uint64_t at) {
    auto it = open.find({channel, key});
    if (it == open.end() || it->second.empty()) return;
    const OpenNote on = it->second.front();
    it->second.pop_front();
    if (at == on.tick) {
      warnings.push_back(where + ": dropped zero-length note " + std::to_string(key));
      return;
    }
    NoteEvent e;
    e.onset = Rational(static_cast<std::int64_t>(on.tick), division);
    e.duration = Rational(static_cast<std::int64_t>(at - on.tick), division);
    e.pitch = key;
    e.velocity = on.velocity;
    e.voice = track_index;
    events.push_back(e);
  };

  while (!in.done()) {
    tick += in.vlq();
    std::uint8_t status = in.peek();
    if (status & 0x80) {
      in.u8();
    } else {
      if (!running) throw ParseError(where + ": data byte without running status");
      status = running;
    }

    if (status == 0xff) {
      const std::uint8_t type = in.u8();
      in.skip(in.vlq());
      running = 0;
      if (type == 0x2f) break;  // end of track
      continue;
    }
    if (status == 0xf0 || status == 0xf7) {
      in.skip(in.vlq());
      running = 0;
      continue;
    }
    if (status >= 0xf0) throw ParseError(where + ": unexpected system message");

    running = status;
    const int kind = status & 0xf0;
    const int channel = status & 0x0f;
    const bool two_data = kind != 0xc0 && kind != 0xd0;
    const int d1 = in.u8() & 0x7f;
    const int d2 = two_data ? (in.u8() & 0x7f) : 0;

    if (kind == 0x90 && d2 > 0) {
      open[{channel, d1}].push_back({tick, d2});
    } else if (kind == 0x80 || kind == 0x90) {
      close(channel, d1, tick);
    }
    // Program change, controllers, aftertouch and pitch bend carry nothing we analyze.
  }

  for (auto& [ck, pending] : open) {
    while (!pending.empty()) {
      warnings.push_back(where + ": unmatched note-on " + std::to_string(ck.second) +
                         " closed at track end");
      close(ck.first, ck.second, tick);
    }
  }
  return events;
}

}  // namespace detail

/// Standard MIDI File (format 0 or 1) to a Piece. Each track with notes becomes
/// one part whose voice id is the track index. Ticks become beats through the
/// header division; tempo and SMPTE timing are not interpreted.
inline Piece import_midi(std::span<const std::uint8_t> bytes, std::vector<std::string>& warnings) {
  detail::ByteReader in(bytes);
  if (in.remaining() < 4 || in.be(4) != 0x4d546864) throw ParseError("midi: bad header magic");
  const std::uint32_t header_len = in.be(4);
  if (header_len < 6) throw ParseError("midi: header chunk too short");
  auto header = detail::ByteReader(in.take(header_len));
  const int format = static_cast<int>(header.be(2));
  const int ntracks = static_cast<int>(header.be(2));
  const int division = static_cast<int>(header.be(2));
  if (format > 1) throw ParseError("midi: unsupported format " + std::to_string(format));
  if (division & 0x8000) throw ParseError("midi: SMPTE time division is not supported");
  if (division == 0) throw ParseError("midi: zero ticks per quarter note");

  std::vector<NoteEvent> events;
  int track = 0;
  while (track < ntracks) {
    if (in.done()) throw ParseError("midi: truncated chunk (expected " + std::to_string(ntracks) + " tracks)");
    const std::uint32_t magic = in.be(4);
    const std::uint32_t len = in.be(4);
    auto body = in.take(len);
    if (magic != 0x4d54726b) continue;  // alien chunk
    auto evs = detail::read_track(body, division, track, warnings);
    events.insert(events.end(), evs.begin(), evs.end());
    ++track;
  }
  return make_piece(std::move(events));
}

inline Piece import_midi(std::span<const std::uint8_t> bytes) {
  std::vector<std::string> warnings;
  return import_midi(bytes, warnings);
}

inline std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace chronoform
