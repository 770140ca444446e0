// Multi-channel image holding one level of the hierarchical music language.

#pragma once

#include <string>

#include "hml/common.hpp"
#include "hml/tensor.hpp"

namespace hml {

/// Channel layout of the Form (level 1) image. The full layout stores two
/// key channels (one-hot tonic, multi-hot scale) ahead of the six phrase
/// countdown channels; the phrases-only layout drops the key channels.
enum class FormLayout { kKeysAndPhrases, kPhrasesOnly };

inline int form_channel_count(FormLayout layout) {
  return layout == FormLayout::kKeysAndPhrases ? 8 : 6;
}

/// First phrase channel inside a Form image.
inline int form_phrase_offset(FormLayout layout) {
  return layout == FormLayout::kKeysAndPhrases ? 2 : 0;
}

inline FormLayout form_layout_from_channels(int channels) {
  if (channels == 8) return FormLayout::kKeysAndPhrases;
  if (channels == 6) return FormLayout::kPhrasesOnly;
  throw DataError("Form image must have 6 or 8 channels, got " + std::to_string(channels));
}

constexpr int kFormHeight = 12;
constexpr int kRollHeight = 128;
constexpr int kRollChannels = 2;  // onset, sustain

/// Width multiplier of level k relative to level 1 (measures).
inline int level_resolution(int level, const SongMeta& meta) {
  switch (level) {
    case 1: return 1;
    case 2: return meta.beats_per_measure;
    case 3:
    case 4: return meta.beats_per_measure * meta.steps_per_beat;
    default: throw DataError("level must be 1-4");
  }
}

inline int level_height(int level) { return level == 1 ? kFormHeight : kRollHeight; }

/// One level of the language as a (channels, width, height) float image.
/// Values of clean (codec-produced) images are in [0, 1]; generated images
/// may exceed that range until binarized by a decoder.
struct LevelImage {
  int level = 1;  // 1-4
  Image data;     // (channels, width, height)

  int channels() const { return data.dim(0); }
  int width() const { return data.dim(1); }
  int height() const { return data.dim(2); }

  /// Expected width for a whole song at this level.
  static int natural_width(int level, const SongMeta& meta) {
    return level_resolution(level, meta) * meta.measures;
  }

  void validate_shape(const SongMeta& meta) const {
    if (level < 1 || level > 4) throw DataError("LevelImage: level out of range");
    if (height() != level_height(level)) throw DataError("LevelImage: bad height");
    if (level == 1) {
      form_layout_from_channels(channels());
      if (width() < meta.measures) throw DataError("LevelImage: form narrower than song");
    } else {
      if (channels() != kRollChannels) throw DataError("LevelImage: piano roll needs 2 channels");
      if (width() != natural_width(level, meta))
        throw DataError("LevelImage: width does not match level resolution");
    }
  }
};

}  // namespace hml
