#include "hml/form_codec.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "hml/rng.hpp"
#include "test_util.hpp"

using namespace hml;

TEST_CASE("form string parsing") {
  SECTION("published 40-measure form") {
    auto phrases = parse_form_string("i4A4A4B8b4A4B8o4");
    REQUIRE(phrases.size() == 8);
    CHECK(total_measures(phrases) == 40);
    std::vector<PhraseLabel> want = {PhraseLabel::kIntro,  PhraseLabel::kVerse,
                                     PhraseLabel::kVerse,  PhraseLabel::kChorus,
                                     PhraseLabel::kBridge, PhraseLabel::kVerse,
                                     PhraseLabel::kChorus, PhraseLabel::kOutro};
    for (size_t i = 0; i < want.size(); ++i) CHECK(phrases[i].type == want[i]);
    CHECK(phrases[3].start_measure == 12);
    CHECK(phrases[3].length == 8);
  }

  SECTION("minimal form") {
    auto phrases = parse_form_string("A1");
    REQUIRE(phrases.size() == 1);
    CHECK(phrases[0] == Phrase{PhraseLabel::kVerse, 0, 1});
  }

  SECTION("parenthesised groups are ignored") {
    auto phrases = parse_form_string("(i8)(A8B16A8B16)(b6)(B14)(o2)");
    REQUIRE(phrases.size() == 8);
    // Oracle: independent summation of the listed lengths.
    int sum = 8 + 8 + 16 + 8 + 16 + 6 + 14 + 2;
    CHECK(total_measures(phrases) == sum);
    CHECK(total_measures(phrases) == 78);
  }

  SECTION("multi-digit lengths and whitespace") {
    auto phrases = parse_form_string(" i12  A16 ");
    REQUIRE(phrases.size() == 2);
    CHECK(phrases[0].length == 12);
    CHECK(phrases[1].length == 16);
  }

  SECTION("errors") {
    CHECK_THROWS_AS(parse_form_string("Q4"), DataError);
    CHECK_THROWS_AS(parse_form_string("A0"), DataError);
    CHECK_THROWS_AS(parse_form_string(""), DataError);
    CHECK_THROWS_AS(parse_form_string("A"), DataError);
  }

  SECTION("format roundtrip") {
    CHECK(format_form_string(parse_form_string("i4A4B8o2")) == "i4A4B8o2");
  }
}

namespace {

SongMeta meta_for(const std::vector<Phrase>& phrases) {
  SongMeta meta;
  meta.measures = total_measures(phrases);
  return meta;
}

}  // namespace

TEST_CASE("countdown encoding") {
  SECTION("four-measure phrase") {
    std::vector<Phrase> phrases = {{PhraseLabel::kVerse, 0, 4}};
    std::vector<KeySpan> keys = {{0, 4, 0, major_scale_mask(0)}};
    LevelImage img = encode_form(phrases, keys, meta_for(phrases));
    REQUIRE(img.data.shape() == std::vector<int>{8, 4, 12});
    int ch = form_phrase_offset(FormLayout::kKeysAndPhrases);  // channel of "A"
    float want[4] = {1.0f, 0.75f, 0.5f, 0.25f};
    for (int m = 0; m < 4; ++m)
      for (int row = 0; row < 12; ++row) CHECK(img.data.at(ch, m, row) == want[m]);
  }

  SECTION("single-measure phrase") {
    std::vector<Phrase> phrases = {{PhraseLabel::kVerse, 0, 1}};
    std::vector<KeySpan> keys = {{0, 1, 0, major_scale_mask(0)}};
    LevelImage img = encode_form(phrases, keys, meta_for(phrases));
    CHECK(img.data.at(2, 0, 5) == 1.0f);
    for (int c = 3; c < 8; ++c)
      for (int row = 0; row < 12; ++row) CHECK(img.data.at(c, 0, row) == 0.0f);
  }

  SECTION("C major key channels") {
    std::vector<Phrase> phrases = {{PhraseLabel::kVerse, 0, 2}};
    std::vector<KeySpan> keys = {{0, 2, 0, major_scale_mask(0)}};
    LevelImage img = encode_form(phrases, keys, meta_for(phrases));
    std::vector<int> scale = {0, 2, 4, 5, 7, 9, 11};
    for (int m = 0; m < 2; ++m) {
      CHECK(img.data.at(0, m, 0) == 1.0f);
      for (int pc = 1; pc < 12; ++pc) CHECK(img.data.at(0, m, pc) == 0.0f);
      for (int pc = 0; pc < 12; ++pc) {
        bool in_scale = std::find(scale.begin(), scale.end(), pc) != scale.end();
        CHECK(img.data.at(1, m, pc) == (in_scale ? 1.0f : 0.0f));
      }
    }
  }

  SECTION("phrases-only layout") {
    std::vector<Phrase> phrases = {{PhraseLabel::kIntro, 0, 2}};
    LevelImage img = encode_form(phrases, {}, meta_for(phrases), FormLayout::kPhrasesOnly);
    REQUIRE(img.data.shape() == std::vector<int>{6, 2, 12});
    CHECK(img.data.at(3, 0, 0) == 1.0f);  // "i" channel id 3
  }

  SECTION("tiling violations rejected") {
    SongMeta meta;
    meta.measures = 4;
    std::vector<KeySpan> keys = {{0, 4, 0, major_scale_mask(0)}};
    CHECK_THROWS_AS(
        encode_form({{PhraseLabel::kVerse, 0, 2}, {PhraseLabel::kVerse, 3, 1}}, keys, meta),
        DataError);
    CHECK_THROWS_AS(encode_form({{PhraseLabel::kVerse, 0, 2}}, keys, meta), DataError);
  }
}

TEST_CASE("countdown properties over random tilings") {
  Rng rng(20240517);
  for (int trial = 0; trial < 500; ++trial) {
    auto phrases = testutil::random_tiling(rng);
    SongMeta meta = meta_for(phrases);
    auto keys = testutil::random_keys(rng, meta.measures);
    LevelImage img = encode_form(phrases, keys, meta);

    // Every countdown pixel equals 1 - (m - m0)/L on its channel, zero off it.
    for (const Phrase& p : phrases) {
      float first = img.data.at(2 + phrase_channel(p.type), p.start_measure, 0);
      CHECK(first == 1.0f);
      float prev = 2.0f;
      for (int m = p.start_measure; m < p.start_measure + p.length; ++m) {
        float expect = 1.0f - static_cast<float>(m - p.start_measure) / p.length;
        int active = 0;
        for (int c = 0; c < 6; ++c) {
          float v = img.data.at(2 + c, m, 7);
          if (c == phrase_channel(p.type)) {
            CHECK(v == expect);
            CHECK(v < prev);
            prev = v;
            if (v != 0.0f) ++active;
          } else {
            CHECK(v == 0.0f);
          }
        }
        CHECK(active == 1);
      }
    }
  }
}

TEST_CASE("form decode") {
  Rng rng(99);

  SECTION("roundtrip identity on clean images") {
    for (int trial = 0; trial < 300; ++trial) {
      auto phrases = testutil::random_tiling(rng);
      SongMeta meta = meta_for(phrases);
      auto keys = testutil::random_keys(rng, meta.measures);
      LevelImage img = encode_form(phrases, keys, meta);
      auto [p2, k2] = decode_form(img);
      CHECK(p2 == phrases);
      CHECK(k2 == keys);
    }
  }

  SECTION("roundtrip through zero padding") {
    auto phrases = parse_form_string("i4A4A4B8b4A4B8o4");
    SongMeta meta = meta_for(phrases);
    auto keys = testutil::random_keys(rng, meta.measures);
    LevelImage img = encode_form(phrases, keys, meta, FormLayout::kKeysAndPhrases, 256);
    auto [p2, k2] = decode_form(img);
    CHECK(p2 == phrases);
    CHECK(k2 == keys);
  }

  SECTION("all-zero image decodes to nothing") {
    LevelImage img;
    img.level = 1;
    img.data = Image({8, 16, 12});
    auto [p2, k2] = decode_form(img);
    CHECK(p2.empty());
    CHECK(k2.empty());
  }

  SECTION("recovery under uniform noise") {
    // Adjacent phrases get distinct types: a length-1 phrase followed by the
    // same type is only separable on clean images (1.0 vs exactly 1.0).
    auto distinct_tiling = [](Rng& r) {
      int count = 1 + r.uniform_int(8);
      std::vector<Phrase> out;
      int cursor = 0, prev = -1;
      for (int i = 0; i < count; ++i) {
        int type;
        do {
          type = r.uniform_int(6);
        } while (type == prev);
        prev = type;
        int len = 1 + r.uniform_int(8);
        out.push_back({static_cast<PhraseLabel>(type), cursor, len});
        cursor += len;
      }
      return out;
    };
    for (int trial = 0; trial < 100; ++trial) {
      auto phrases = distinct_tiling(rng);
      SongMeta meta = meta_for(phrases);
      auto keys = testutil::random_keys(rng, meta.measures);
      LevelImage img = encode_form(phrases, keys, meta);
      for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] += static_cast<float>(rng.uniform(-0.05, 0.05));
      auto [p2, k2] = decode_form(img);
      CHECK(p2 == phrases);
      CHECK(k2 == keys);
    }
  }
}

TEST_CASE("song length inference") {
  Rng rng(7);

  SECTION("padded forms recover M") {
    for (int m_target : {1, 2, 3, 7, 40, 100, 255, 256}) {
      std::vector<Phrase> phrases;
      int cursor = 0;
      Rng local(static_cast<uint64_t>(m_target));
      while (cursor < m_target) {
        int len = std::min(1 + local.uniform_int(8), m_target - cursor);
        phrases.push_back({static_cast<PhraseLabel>(local.uniform_int(6)), cursor, len});
        cursor += len;
      }
      SongMeta meta = meta_for(phrases);
      auto keys = testutil::random_keys(rng, meta.measures);
      LevelImage img = encode_form(phrases, keys, meta, FormLayout::kKeysAndPhrases, 256);
      CHECK(infer_song_length(img) == m_target);
    }
  }

  SECTION("no quiet suffix returns the width") {
    std::vector<Phrase> phrases = {{PhraseLabel::kVerse, 0, 256}};
    SongMeta meta = meta_for(phrases);
    std::vector<KeySpan> keys = {{0, 256, 0, major_scale_mask(0)}};
    LevelImage img = encode_form(phrases, keys, meta);
    CHECK(infer_song_length(img) == 256);
  }

  SECTION("empty image is an error") {
    LevelImage img;
    img.level = 1;
    img.data = Image({8, 256, 12});
    CHECK_THROWS_AS(infer_song_length(img), DataError);
  }
}
