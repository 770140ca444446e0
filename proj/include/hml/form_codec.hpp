// Form (level 1) codec: form strings, countdown encoding, decoding, and
// song-length inference on zero-padded images.
//
// A phrase of length L starting at measure m0 is written onto its type's
// channel as the countdown 1 - (m - m0) / L, broadcast over all 12 pitch
// rows. Key channels hold a one-hot tonic and a multi-hot scale per measure.

#pragma once

#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "hml/common.hpp"
#include "hml/level_image.hpp"

namespace hml {

// ---------------------------------------------------------------------------
// Form strings ("i4A4A4B8b4A4B8o4"); parentheses and whitespace are grouping
// sugar and are ignored.

inline std::vector<Phrase> parse_form_string(const std::string& text) {
  std::vector<Phrase> phrases;
  int cursor = 0;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    PhraseLabel label = phrase_label_from_char(c);
    ++i;
    size_t digits_start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == digits_start)
      throw DataError("form string: phrase '" + std::string(1, c) + "' lacks a length");
    int length = std::stoi(text.substr(digits_start, i - digits_start));
    if (length == 0) throw DataError("form string: zero-length phrase");
    phrases.push_back(Phrase{label, cursor, length});
    cursor += length;
  }
  if (phrases.empty()) throw DataError("form string: empty");
  return phrases;
}

inline int total_measures(const std::vector<Phrase>& phrases) {
  int total = 0;
  for (const Phrase& p : phrases) total += p.length;
  return total;
}

inline std::string format_form_string(const std::vector<Phrase>& phrases) {
  std::string out;
  for (const Phrase& p : phrases) {
    out += phrase_label_char(p.type);
    out += std::to_string(p.length);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Encoding

/// Encodes phrases and keys into a level-1 image. `padded_width` widens the
/// image with zero columns on the right (0 = natural width). Keys are
/// required for the kKeysAndPhrases layout and ignored otherwise.
inline LevelImage encode_form(const std::vector<Phrase>& phrases,
                              const std::vector<KeySpan>& keys, const SongMeta& meta,
                              FormLayout layout = FormLayout::kKeysAndPhrases,
                              int padded_width = 0) {
  meta.validate();
  validate_phrase_tiling(phrases, meta.measures);
  int width = padded_width > 0 ? padded_width : meta.measures;
  if (width < meta.measures) throw DataError("encode_form: padded width narrower than song");

  LevelImage img;
  img.level = 1;
  img.data = Image({form_channel_count(layout), width, kFormHeight});

  if (layout == FormLayout::kKeysAndPhrases) {
    validate_key_tiling(keys, meta.measures);
    for (const KeySpan& k : keys) {
      for (int m = k.start_measure; m < k.end_measure; ++m) {
        img.data.at(0, m, k.tonic) = 1.0f;
        for (int pc = 0; pc < 12; ++pc)
          if (k.scale_mask & (1u << pc)) img.data.at(1, m, pc) = 1.0f;
      }
    }
  }

  int offset = form_phrase_offset(layout);
  for (const Phrase& p : phrases) {
    int channel = offset + phrase_channel(p.type);
    for (int m = p.start_measure; m < p.start_measure + p.length; ++m) {
      float v = 1.0f - static_cast<float>(m - p.start_measure) / static_cast<float>(p.length);
      for (int row = 0; row < kFormHeight; ++row) img.data.at(channel, m, row) = v;
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Decoding

struct FormDecodeOptions {
  /// Binarization threshold for key channels.
  float threshold = 0.5f;
  /// A measure counts as part of the song while any pixel reaches this.
  float empty_floor = 0.1f;
};

/// Best-effort inverse of encode_form. Exact on clean images; robust to
/// pixel noise below the countdown step of the shortest phrase. Trailing
/// all-quiet measures are treated as padding. Interior measures whose
/// countdown tail drops under the floor extend the running phrase.
inline std::pair<std::vector<Phrase>, std::vector<KeySpan>> decode_form(
    const LevelImage& img, const FormDecodeOptions& opt = {}) {
  if (img.level != 1) throw DataError("decode_form: not a level-1 image");
  FormLayout layout = form_layout_from_channels(img.channels());
  int offset = form_phrase_offset(layout);
  int width = img.width();

  // Column statistics. Means average down pixel noise; maxima detect
  // activity of one-hot rows.
  std::vector<std::vector<double>> mean(static_cast<size_t>(img.channels()),
                                        std::vector<double>(static_cast<size_t>(width), 0.0));
  std::vector<double> col_max(static_cast<size_t>(width), 0.0);
  for (int c = 0; c < img.channels(); ++c) {
    for (int m = 0; m < width; ++m) {
      double sum = 0.0;
      for (int row = 0; row < kFormHeight; ++row) {
        double v = img.data.at(c, m, row);
        sum += v;
        col_max[static_cast<size_t>(m)] = std::max(col_max[static_cast<size_t>(m)], v);
      }
      mean[static_cast<size_t>(c)][static_cast<size_t>(m)] = sum / kFormHeight;
    }
  }

  int measures = 0;
  for (int m = 0; m < width; ++m)
    if (col_max[static_cast<size_t>(m)] >= opt.empty_floor) measures = m + 1;
  if (measures == 0) return {{}, {}};

  // Phrase segmentation. A boundary is a channel switch or a countdown
  // reset (non-decreasing column value).
  std::vector<Phrase> phrases;
  int run_channel = -1;
  double prev_value = 2.0;
  for (int m = 0; m < measures; ++m) {
    int best = 0;
    double best_v = -1.0;
    for (int c = 0; c < kPhraseChannelCount; ++c) {
      double v = mean[static_cast<size_t>(offset + c)][static_cast<size_t>(m)];
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    bool faded = best_v < opt.empty_floor * 0.5;
    if (faded && run_channel >= 0) {
      // Countdown tail of a long phrase; keep extending it.
      phrases.back().length += 1;
      prev_value = best_v;
      continue;
    }
    if (run_channel == best && best_v < prev_value) {
      phrases.back().length += 1;
    } else {
      phrases.push_back(Phrase{static_cast<PhraseLabel>(best), m, 1});
      run_channel = best;
    }
    prev_value = best_v;
  }

  // Keys.
  std::vector<KeySpan> keys;
  if (layout == FormLayout::kKeysAndPhrases) {
    int prev_tonic = -1;
    uint16_t prev_mask = 0;
    for (int m = 0; m < measures; ++m) {
      int tonic = 0;
      double best = -1.0;
      for (int row = 0; row < 12; ++row) {
        double v = img.data.at(0, m, row);
        if (v > best) {
          best = v;
          tonic = row;
        }
      }
      uint16_t mask = 0;
      for (int row = 0; row < 12; ++row)
        if (img.data.at(1, m, row) >= opt.threshold) mask |= static_cast<uint16_t>(1u << row);
      if (best < opt.threshold && !keys.empty()) {
        // Quiet key column inherits the running span.
        keys.back().end_measure = m + 1;
        continue;
      }
      if (tonic == prev_tonic && mask == prev_mask && !keys.empty()) {
        keys.back().end_measure = m + 1;
      } else {
        keys.push_back(KeySpan{m, m + 1, tonic, mask});
        prev_tonic = tonic;
        prev_mask = mask;
      }
    }
  }
  return {phrases, keys};
}

// ---------------------------------------------------------------------------
// Song length inference on padded Form images

/// Smallest m such that every pixel in columns >= m is below the threshold;
/// the image width when there is no quiet suffix. Throws on an entirely
/// quiet image.
inline int infer_song_length(const LevelImage& img, float empty_threshold = 0.1f) {
  if (img.level != 1) throw DataError("infer_song_length: not a level-1 image");
  int last_active = -1;
  for (int m = 0; m < img.width(); ++m) {
    for (int c = 0; c < img.channels() && last_active < m; ++c)
      for (int row = 0; row < img.height(); ++row)
        if (img.data.at(c, m, row) >= empty_threshold) {
          last_active = m;
          break;
        }
  }
  if (last_active < 0) throw DataError("empty generation");
  return last_active + 1;
}

}  // namespace hml
