// Core domain types of the four-level hierarchical music language.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hml {

// ---------------------------------------------------------------------------
// Errors

/// Malformed symbolic content (bad form string, overlapping phrases, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken file, wrong magic, truncated payload.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite loss, divergence, failed numeric precondition.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Meter

/// Song-level meter constants. A piece spans `measures` measures, each with
/// `beats_per_measure` beats of `steps_per_beat` steps.
struct SongMeta {
  int measures = 0;
  int beats_per_measure = 4;  // in {3, 4}
  int steps_per_beat = 4;     // fixed default

  int beat_width() const { return beats_per_measure * measures; }
  int step_width() const { return steps_per_beat * beats_per_measure * measures; }
  int steps_per_measure() const { return steps_per_beat * beats_per_measure; }

  void validate() const {
    if (measures < 1) throw DataError("SongMeta: measures must be >= 1");
    if (beats_per_measure != 3 && beats_per_measure != 4)
      throw DataError("SongMeta: beats_per_measure must be 3 or 4");
    if (steps_per_beat < 1) throw DataError("SongMeta: steps_per_beat must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Phrases

/// Six phrase types and their fixed image channel ids.
enum class PhraseLabel : uint8_t {
  kVerse = 0,   // "A"
  kChorus = 1,  // "B"
  kMelodic = 2, // "X", other phrases with lead melody
  kIntro = 3,   // "i"
  kOutro = 4,   // "o"
  kBridge = 5,  // "b"
};

constexpr int kPhraseChannelCount = 6;

inline char phrase_label_char(PhraseLabel l) {
  static constexpr std::array<char, 6> kChars = {'A', 'B', 'X', 'i', 'o', 'b'};
  return kChars[static_cast<int>(l)];
}

inline PhraseLabel phrase_label_from_char(char c) {
  switch (c) {
    case 'A': return PhraseLabel::kVerse;
    case 'B': return PhraseLabel::kChorus;
    case 'X': return PhraseLabel::kMelodic;
    case 'i': return PhraseLabel::kIntro;
    case 'o': return PhraseLabel::kOutro;
    case 'b': return PhraseLabel::kBridge;
    default:
      throw DataError(std::string("unknown phrase label '") + c + "'");
  }
}

inline int phrase_channel(PhraseLabel l) { return static_cast<int>(l); }

/// Contiguous run of measures with one phrase type.
struct Phrase {
  PhraseLabel type = PhraseLabel::kVerse;
  int start_measure = 0;
  int length = 1;  // in measures, >= 1

  bool operator==(const Phrase&) const = default;
};

/// Checks that phrases tile [0, measures) with no gap or overlap.
inline void validate_phrase_tiling(const std::vector<Phrase>& phrases, int measures) {
  int cursor = 0;
  for (const Phrase& p : phrases) {
    if (p.length < 1) throw DataError("phrase length must be >= 1");
    if (p.start_measure != cursor)
      throw DataError("phrases must tile the song: gap or overlap at measure " +
                      std::to_string(p.start_measure));
    cursor += p.length;
  }
  if (cursor != measures)
    throw DataError("phrases cover " + std::to_string(cursor) + " measures, song has " +
                    std::to_string(measures));
}

// ---------------------------------------------------------------------------
// Keys

/// Key region: [start_measure, end_measure) with tonic pitch class and a
/// 12-bit scale membership mask (bit p set = pitch class p is in the scale).
struct KeySpan {
  int start_measure = 0;
  int end_measure = 0;
  int tonic = 0;            // 0-11
  uint16_t scale_mask = 0;  // 12 bits

  bool operator==(const KeySpan&) const = default;
};

constexpr uint16_t kMajorScaleMask = 0b101010110101;   // {0,2,4,5,7,9,11}
constexpr uint16_t kNaturalMinorMask = 0b010110101101; // {0,2,3,5,7,8,10}

inline uint16_t rotate_scale_mask(uint16_t mask, int tonic) {
  tonic = ((tonic % 12) + 12) % 12;
  uint32_t wide = (static_cast<uint32_t>(mask) << tonic);
  return static_cast<uint16_t>((wide | (wide >> 12)) & 0xFFF);
}

inline uint16_t major_scale_mask(int tonic) { return rotate_scale_mask(kMajorScaleMask, tonic); }
inline uint16_t minor_scale_mask(int tonic) { return rotate_scale_mask(kNaturalMinorMask, tonic); }

inline void validate_key_tiling(const std::vector<KeySpan>& keys, int measures) {
  int cursor = 0;
  for (const KeySpan& k : keys) {
    if (k.start_measure != cursor || k.end_measure <= k.start_measure)
      throw DataError("keys must tile the song without gap or overlap");
    if (k.tonic < 0 || k.tonic > 11) throw DataError("tonic out of range");
    if (!(k.scale_mask & (1u << k.tonic)))
      throw DataError("scale mask must contain the tonic");
    cursor = k.end_measure;
  }
  if (cursor != measures) throw DataError("keys do not cover the whole song");
}

// ---------------------------------------------------------------------------
// Events

/// One note in the time units of its level (measures, beats, or steps).
struct Note {
  int onset = 0;
  int duration = 1;
  int pitch = 60;  // MIDI 0-127

  bool operator==(const Note&) const = default;
};

/// One chord event. `chroma` is the 12-bit mask of sounding chord tones.
struct ChordEvent {
  int onset = 0;
  int duration = 1;
  int root = 0;            // pitch class 0-11
  uint16_t chroma = 0;     // 12-bit mask, must contain the root
  int bass = 0;            // pitch class; image codecs do not carry it

  bool operator==(const ChordEvent&) const = default;
};

inline void validate_note(const Note& n, int level_width) {
  if (n.pitch < 0 || n.pitch > 127) throw DataError("note pitch out of MIDI range");
  if (n.onset < 0 || n.duration < 1 || n.onset + n.duration > level_width)
    throw DataError("note exceeds level span");
}

inline void validate_chord(const ChordEvent& c, int level_width) {
  if (c.root < 0 || c.root > 11) throw DataError("chord root out of range");
  if (c.chroma == 0) throw DataError("chord chroma is empty");
  if (!(c.chroma & (1u << c.root))) throw DataError("chord chroma must contain the root");
  if (c.onset < 0 || c.duration < 1 || c.onset + c.duration > level_width)
    throw DataError("chord exceeds level span");
}

template <typename Event>
inline void sort_by_onset(std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.onset < b.onset; });
}

/// Canonical event order used for roundtrip comparisons: notes by
/// (onset, pitch), chords by (onset, root).
inline void canonicalize(std::vector<Note>& notes) {
  std::sort(notes.begin(), notes.end(), [](const Note& a, const Note& b) {
    return a.onset != b.onset ? a.onset < b.onset : a.pitch < b.pitch;
  });
}

inline void canonicalize(std::vector<ChordEvent>& chords) {
  std::sort(chords.begin(), chords.end(), [](const ChordEvent& a, const ChordEvent& b) {
    return a.onset != b.onset ? a.onset < b.onset : a.root < b.root;
  });
}

// ---------------------------------------------------------------------------
// Song document

/// Symbolic content of all four language levels of one song.
///
/// `reduced_melody` and `reduced_chords` live at beat resolution; `melody`,
/// `chords`, and `accompaniment` live at step resolution. All event lists are
/// sorted by onset and confined to the song span.
struct SongDocument {
  SongMeta meta;
  std::vector<Phrase> phrases;
  std::vector<KeySpan> keys;
  std::vector<Note> reduced_melody;
  std::vector<ChordEvent> reduced_chords;
  std::vector<Note> melody;
  std::vector<ChordEvent> chords;
  std::vector<Note> accompaniment;

  void validate() const {
    meta.validate();
    validate_phrase_tiling(phrases, meta.measures);
    if (!keys.empty()) validate_key_tiling(keys, meta.measures);
    for (const Note& n : reduced_melody) validate_note(n, meta.beat_width());
    for (const ChordEvent& c : reduced_chords) validate_chord(c, meta.beat_width());
    for (const Note& n : melody) validate_note(n, meta.step_width());
    for (const ChordEvent& c : chords) validate_chord(c, meta.step_width());
    for (const Note& n : accompaniment) validate_note(n, meta.step_width());
  }

  bool operator==(const SongDocument& other) const {
    return meta.measures == other.meta.measures &&
           meta.beats_per_measure == other.meta.beats_per_measure &&
           meta.steps_per_beat == other.meta.steps_per_beat &&
           phrases == other.phrases && keys == other.keys &&
           reduced_melody == other.reduced_melody &&
           reduced_chords == other.reduced_chords && melody == other.melody &&
           chords == other.chords && accompaniment == other.accompaniment;
  }
};

}  // namespace hml
