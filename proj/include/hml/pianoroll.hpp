// Piano-roll codec for levels 2-4 and the channel-stacking operator.
//
// Levels 2 and 3 share one roll between melody and chords using disjoint
// registers: chord roots sit at rows 24..35 (row = 24 + root pitch class),
// chord tones at rows 48..59 (row = 48 + pitch class), and the melody is
// required to stay at row 60 and above. Level 4 is a plain note roll.
// Channel 0 marks onsets, channel 1 marks sustains.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hml/common.hpp"
#include "hml/level_image.hpp"

namespace hml {

constexpr int kChordRootRow = 24;
constexpr int kChordChromaRow = 48;
constexpr int kMelodyFloorRow = 60;

namespace detail {

inline void render_span(Image& img, int row, int onset, int duration) {
  img.at(0, onset, row) = 1.0f;
  for (int t = onset + 1; t < onset + duration; ++t) img.at(1, t, row) = 1.0f;
}

inline void check_no_same_pitch_overlap(const std::vector<Note>& notes) {
  std::map<int, int> open_until;  // pitch -> end
  for (const Note& n : notes) {
    auto it = open_until.find(n.pitch);
    if (it != open_until.end() && n.onset < it->second)
      throw DataError("overlapping notes at pitch " + std::to_string(n.pitch));
    open_until[n.pitch] = n.onset + n.duration;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Encoding

/// Renders notes (and, for levels 2-3, chords) into an onset/sustain roll.
/// Events use the level's own time unit. Notes must be sorted by onset.
inline LevelImage encode_pianoroll(const std::vector<Note>& notes,
                                   const std::vector<ChordEvent>& chords, int level,
                                   const SongMeta& meta) {
  if (level < 2 || level > 4) throw DataError("encode_pianoroll: level must be 2-4");
  meta.validate();
  int width = LevelImage::natural_width(level, meta);

  LevelImage img;
  img.level = level;
  img.data = Image({kRollChannels, width, kRollHeight});

  if (!chords.empty() && level == 4)
    throw DataError("encode_pianoroll: level 4 carries no chords");

  std::vector<Note> sorted_notes = notes;
  sort_by_onset(sorted_notes);
  detail::check_no_same_pitch_overlap(sorted_notes);

  for (const Note& n : sorted_notes) {
    validate_note(n, width);
    if (!chords.empty() && n.pitch < kMelodyFloorRow)
      throw DataError("register collision: melody pitch " + std::to_string(n.pitch) +
                      " enters the chord register (< " + std::to_string(kMelodyFloorRow) + ")");
    detail::render_span(img.data, n.pitch, n.onset, n.duration);
  }

  for (const ChordEvent& c : chords) {
    validate_chord(c, width);
    detail::render_span(img.data, kChordRootRow + c.root, c.onset, c.duration);
    for (int pc = 0; pc < 12; ++pc)
      if (c.chroma & (1u << pc))
        detail::render_span(img.data, kChordChromaRow + pc, c.onset, c.duration);
  }
  return img;
}

// ---------------------------------------------------------------------------
// Decoding

namespace detail {

/// Extracts note spans from one pitch row. An onset pixel starts a note,
/// sustain pixels extend it, and orphan sustains are promoted to onsets so
/// that decoding is total.
inline std::vector<Note> decode_row(const Image& img, int row, float threshold) {
  std::vector<Note> out;
  int width = img.dim(1);
  bool open = false;
  for (int t = 0; t < width; ++t) {
    bool onset = img.at(0, t, row) >= threshold;
    bool sustain = img.at(1, t, row) >= threshold;
    if (open) {
      if (sustain) {
        out.back().duration += 1;
      } else if (onset) {
        out.push_back(Note{t, 1, row});
      } else {
        open = false;
      }
    } else if (onset || sustain) {
      out.push_back(Note{t, 1, row});
      open = true;
    }
  }
  return out;
}

}  // namespace detail

/// Best-effort inverse of encode_pianoroll; exact on clean images. For
/// levels 2-3, chord-register rows reassemble into ChordEvents and every
/// other row decodes as a melody note row.
inline std::pair<std::vector<Note>, std::vector<ChordEvent>> decode_pianoroll(
    const LevelImage& img, float threshold = 0.5f) {
  if (img.level < 2 || img.level > 4) throw DataError("decode_pianoroll: level must be 2-4");
  bool has_chord_registers = img.level != 4;

  std::vector<Note> notes;
  std::vector<Note> root_notes;
  std::vector<std::vector<Note>> chroma_notes(12);
  for (int row = 0; row < img.height(); ++row) {
    bool is_root_row =
        has_chord_registers && row >= kChordRootRow && row < kChordRootRow + 12;
    bool is_chroma_row =
        has_chord_registers && row >= kChordChromaRow && row < kChordChromaRow + 12;
    std::vector<Note> spans = detail::decode_row(img.data, row, threshold);
    if (is_root_row) {
      root_notes.insert(root_notes.end(), spans.begin(), spans.end());
    } else if (is_chroma_row) {
      auto& bucket = chroma_notes[static_cast<size_t>(row - kChordChromaRow)];
      bucket.insert(bucket.end(), spans.begin(), spans.end());
    } else {
      notes.insert(notes.end(), spans.begin(), spans.end());
    }
  }
  sort_by_onset(notes);

  std::vector<ChordEvent> chords;
  for (const Note& root_note : root_notes) {
    ChordEvent c;
    c.onset = root_note.onset;
    c.duration = root_note.duration;
    c.root = root_note.pitch - kChordRootRow;
    c.bass = c.root;
    for (int pc = 0; pc < 12; ++pc)
      for (const Note& tone : chroma_notes[static_cast<size_t>(pc)])
        if (tone.onset == c.onset && tone.duration == c.duration) {
          c.chroma |= static_cast<uint16_t>(1u << pc);
          break;
        }
    if (c.chroma == 0) {
      // Generated images may misalign chord tones; fall back to whatever
      // sounds at the onset column, then to the bare root.
      for (int pc = 0; pc < 12; ++pc) {
        int row = kChordChromaRow + pc;
        if (img.data.at(0, c.onset, row) >= threshold ||
            img.data.at(1, c.onset, row) >= threshold)
          c.chroma |= static_cast<uint16_t>(1u << pc);
      }
      c.chroma |= static_cast<uint16_t>(1u << c.root);
    }
    chords.push_back(c);
  }
  sort_by_onset(chords);
  return {notes, chords};
}

// ---------------------------------------------------------------------------
// Channel stacking across levels

/// Stacks language levels over one window into a single image at
/// `target_level` resolution. Coarser levels are width-expanded by
/// nearest-neighbor repetition; 12-row Form images are height-tiled so that
/// output row p carries pitch class p mod 12. Channels are ordered finest
/// level first. The window is [start, start + len) in target-level units
/// and must be covered by every input after resolution scaling.
inline Image stack_levels(const std::vector<const LevelImage*>& levels, int target_level,
                          int start, int len, const SongMeta& meta) {
  if (levels.empty()) throw DataError("stack_levels: no input levels");
  if (start < 0 || len <= 0) throw DataError("stack_levels: bad window");
  int target_res = level_resolution(target_level, meta);
  int target_height = level_height(target_level);

  std::vector<const LevelImage*> ordered = levels;
  std::sort(ordered.begin(), ordered.end(),
            [](const LevelImage* a, const LevelImage* b) { return a->level > b->level; });

  int total_channels = 0;
  for (const LevelImage* img : ordered) {
    if (img->level > target_level) throw DataError("stack_levels: level above target");
    total_channels += img->channels();
  }

  Image out({total_channels, len, target_height});
  int channel_base = 0;
  for (const LevelImage* img : ordered) {
    int ratio = target_res / level_resolution(img->level, meta);
    if (ratio * level_resolution(img->level, meta) != target_res)
      throw DataError("stack_levels: incompatible resolutions");
    if (start % ratio != 0 || len % ratio != 0)
      throw DataError("stack_levels: window not aligned to level " +
                      std::to_string(img->level) + " resolution");
    int src_start = start / ratio;
    int src_len = len / ratio;
    if (src_start + src_len > img->width()) throw DataError("stack_levels: window out of range");
    for (int c = 0; c < img->channels(); ++c)
      for (int x = 0; x < len; ++x) {
        int sx = src_start + x / ratio;
        for (int y = 0; y < target_height; ++y) {
          int sy = img->height() == target_height ? y : y % img->height();
          out.at(channel_base + c, x, y) = img->data.at(c, sx, sy);
        }
      }
    channel_base += img->channels();
  }
  return out;
}

}  // namespace hml
