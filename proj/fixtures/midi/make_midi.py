#!/usr/bin/env python3
"""Writes the Standard MIDI File fixtures byte by byte.

Independent of the C++ importer: every file is assembled here from raw
chunk bytes, and the expected contents are spelled out next to each one.
Run from this directory; the outputs are committed.
"""
import struct


def vlq(n):
    out = [n & 0x7F]
    n >>= 7
    while n:
        out.insert(0, (n & 0x7F) | 0x80)
        n >>= 7
    return bytes(out)


def header(fmt, ntracks, division):
    return b"MThd" + struct.pack(">IHHH", 6, fmt, ntracks, division)


def track(body):
    return b"MTrk" + struct.pack(">I", len(body)) + body


END = b"\x00\xff\x2f\x00"


def write(name, data):
    with open(name, "wb") as f:
        f.write(data)
    print(name, data.hex(" "))


# One middle C quarter note at tick 0, division 480:
#   expected NoteEvent{onset=0, duration=1, pitch=60, velocity=100, voice=0}
write("single_c4.mid",
      header(0, 1, 480) +
      track(vlq(0) + b"\x90\x3c\x64" + vlq(480) + b"\x80\x3c\x40" + END))

# Running status with velocity-0 note-offs, division 96:
#   C4 [0, 1), E4 [1, 3/2), G4 [3/2, 2)
write("running_status.mid",
      header(0, 1, 96) +
      track(vlq(0) + b"\x90\x3c\x50" + vlq(96) + b"\x3c\x00" +
            vlq(0) + b"\x40\x50" + vlq(48) + b"\x40\x00" +
            vlq(0) + b"\x43\x50" + vlq(48) + b"\x43\x00" + END))

# Format 1 with no tracks at all: empty piece.
write("no_tracks.mid", header(1, 0, 480))

# Format 1: tempo track (no notes), then two voices; includes a program
# change, a controller and pitch bend that must be ignored.
#   track 1: A4 [0, 2) vel 90
#   track 2: A3 [1, 2) vel 70 on channel 2
write("two_voices.mid",
      header(1, 3, 240) +
      track(vlq(0) + b"\xff\x51\x03\x07\xa1\x20" + END) +
      track(vlq(0) + b"\xc0\x13" + vlq(0) + b"\xb0\x07\x64" +
            vlq(0) + b"\x90\x45\x5a" + vlq(480) + b"\x80\x45\x00" + END) +
      track(vlq(240) + b"\x92\x39\x46" + vlq(120) + b"\xe2\x00\x40" +
            vlq(120) + b"\x82\x39\x00" + END))

# A note-on that never closes: closed at the end of the track (tick 960 of 480)
#   expected D4 [0, 2) plus a warning
write("unmatched.mid",
      header(0, 1, 480) +
      track(vlq(0) + b"\x90\x3e\x64" + vlq(960) + b"\xff\x2f\x00"))
