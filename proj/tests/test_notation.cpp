#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "khayal/notation.hpp"
#include "khayal/text.hpp"
#include "support.hpp"

using namespace khayal;

namespace {

std::string header(int bpc = 16) {
  return "bandish,raga,tala,beats_per_cycle\nTest,Bhimpalasi," + std::string(bpc == 16 ? "teentaal" : "other") + "," +
         std::to_string(bpc) + "\n";
}

std::string row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

std::vector<std::string> pad(std::vector<std::string> v, std::size_t n = 16) {
  v.resize(n);
  return v;
}

/// Random valid line in canonical spelling: notes row and lyric row.
std::pair<std::vector<std::string>, std::vector<std::string>> random_line(std::mt19937_64& rng, int bpc) {
  static const std::vector<std::string> swars{".n", "S", "R", "g", "m", "P", "D", "n", "S'", "R'"};
  static const std::vector<std::string> words{"Jaa", "Re", "Ma", "Na", "Pi", "Ya", "Ko"};
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<std::size_t> sw(0, swars.size() - 1), wd(0, words.size() - 1);
  std::vector<std::string> notes, lyrics;
  bool open = false;
  for (int b = 0; b < bpc; ++b) {
    const int k = kind(rng);
    if (k < 2) {  // rest
      notes.emplace_back();
      lyrics.emplace_back();
      open = false;
    } else if (k < 5 && open) {  // sustain, held or with notes
      if (k == 4) {
        notes.push_back(swars[sw(rng)]);
      } else {
        notes.emplace_back("s");
      }
      lyrics.emplace_back("-");
    } else {  // syllable(s)
      const int nsyl = k == 9 ? 2 : 1;
      const int nsw = nsyl + static_cast<int>(rng() % 2);
      std::string n, l;
      if (k == 8) n = "(" + swars[sw(rng)] + ")";
      for (int i = 0; i < nsw; ++i) n += (i ? " " : "") + swars[sw(rng)];
      for (int i = 0; i < nsyl; ++i) l += (i ? " " : "") + words[wd(rng)];
      notes.push_back(n);
      lyrics.push_back(l);
      open = true;
    }
  }
  return {notes, lyrics};
}

}  // namespace

TEST(Swar, TokensRoundTrip) {
  for (char c : kDegreeLetters)
    for (const std::string& tok : {std::string(1, c), "." + std::string(1, c), std::string(1, c) + "'"}) {
      const auto s = parse_swar(tok);
      EXPECT_EQ(render(s), tok);
    }
  for (const char* bad : {"", "X", "SS", ".S'", "s", "'S", ".."}) EXPECT_FALSE(try_parse_swar(bad)) << bad;
  EXPECT_THROW(parse_swar("Q"), ParseError);
}

TEST(Swar, StringRoundTrip) {
  std::mt19937_64 rng(11);
  std::vector<SwarSymbol> alphabet;
  for (int o = -1; o <= 1; ++o)
    for (int d = 0; d < 12; ++d) alphabet.push_back({static_cast<Degree>(d), o});
  for (int i = 0; i < 200; ++i) {
    const auto s = testkit::random_string(rng, rng() % 30, alphabet);
    EXPECT_EQ(parse_string(render_string(s)), s);
  }
}

TEST(Notation, SustainAttachesToPrecedingSyllable) {
  const auto src = header() + row(pad({"m", "s", "P"})) + row(pad({"Jaa", "-", "Jaa"}));
  const auto score = parse_notation(src);
  const auto& syl = canonical_positions(score, 1);
  ASSERT_EQ(syl.size(), 2u);
  EXPECT_EQ(syl[0].label, "Jaa1");
  EXPECT_EQ(syl[0].beat_index, 0);
  EXPECT_EQ(syl[0].allotted_beats, 2);
  EXPECT_EQ(syl[1].label, "Jaa2");
  EXPECT_EQ(syl[1].allotted_beats, 1);
}

TEST(Notation, EmptyRowPairIsAllRests) {
  const auto score = parse_notation(header() + row(pad({})) + row(pad({})));
  ASSERT_EQ(score.lines.size(), 1u);
  EXPECT_EQ(score.lines[0].cells.size(), 16u);
  EXPECT_EQ(score.lines[0].rest_count(), 16);
  EXPECT_TRUE(score.lines[0].syllables.empty());
}

TEST(Notation, BundledJaJaRe) {
  const auto score = parse_notation(text::read_file(testkit::kSyntheticDir / "notation" / "ja_ja_re.csv"));
  EXPECT_EQ(score.bandish_name, "Ja Ja Re");
  EXPECT_EQ(score.raga_name, "Bhimpalasi");
  EXPECT_EQ(score.beats_per_cycle, 16);
  ASSERT_EQ(score.lines.size(), 4u);
  const auto& l1 = canonical_positions(score, 1);
  const std::vector<std::string> labels{"Jaa1", "Jaa2", "Re", "Apne", "Man", "Di", "Ra", "Va", "Sun", "Pa", "Ne"};
  const std::vector<int> beats{0, 2, 4, 5, 6, 8, 9, 10, 13, 14, 15};
  const std::vector<int> allotted{2, 2, 1, 1, 2, 1, 1, 2, 1, 1, 1};
  ASSERT_EQ(l1.size(), labels.size());
  for (std::size_t i = 0; i < l1.size(); ++i) {
    EXPECT_EQ(l1[i].label, labels[i]);
    EXPECT_EQ(l1[i].beat_index, beats[i]);
    EXPECT_EQ(l1[i].allotted_beats, allotted[i]);
  }
  EXPECT_EQ(render(l1[3].ornament.at(0)), "D");
  EXPECT_EQ(render_string(l1[3].swars), "P");
}

TEST(Notation, LineOutOfRange) {
  const auto score = parse_notation(header() + row(pad({"S"})) + row(pad({"Sa"})));
  EXPECT_THROW(canonical_positions(score, 99), NotFoundError);
  EXPECT_THROW(canonical_positions(score, 0), NotFoundError);
  EXPECT_EQ(canonical_positions(score, 1).size(), 1u);
}

TEST(Notation, Errors) {
  auto message = [](const std::string& src) -> std::string {
    try {
      parse_notation(src);
    } catch (const ParseError& e) {
      return e.what();
    }
    return "";
  };
  const auto short_row = message(header() + row(pad({"S"}, 15)) + row(pad({"Sa"})));
  EXPECT_NE(short_row.find("line 1"), std::string::npos) << short_row;
  EXPECT_NE(short_row.find("15"), std::string::npos) << short_row;

  const auto bad_swar = message(header() + row(pad({"S", "X"})) + row(pad({"Sa", "Re"})));
  EXPECT_NE(bad_swar.find("'X'"), std::string::npos) << bad_swar;
  EXPECT_NE(bad_swar.find("cell 2"), std::string::npos) << bad_swar;

  EXPECT_NE(message(header() + row(pad({"S", "s"})) + row(pad({"Sa", "Re"}))).find("sustain"), std::string::npos);
  EXPECT_FALSE(message(header() + row(pad({"s"})) + row(pad({"-"}))).empty());
  EXPECT_FALSE(message(header() + row(pad({"S"})) + row(pad({""}))).empty());
  EXPECT_FALSE(message(header() + row(pad({""})) + row(pad({"Sa"}))).empty());
  EXPECT_FALSE(message("bandish,raga,tala,beats_per_cycle\nT,R,teentaal,12\n").empty());
  EXPECT_FALSE(message("bandish,raga,tala,beats_per_cycle\nT,R,x,7\n").empty());
  EXPECT_FALSE(message(header() + row(pad({"S"}))).empty());
}

TEST(Notation, MultipleSyllablesShareABeat) {
  const auto score = parse_notation(header() + row(pad({"n D P", "m"})) + row(pad({"Hun Main", "Ja"})));
  const auto& syl = canonical_positions(score, 1);
  ASSERT_EQ(syl.size(), 3u);
  EXPECT_EQ(render_string(syl[0].swars), "nD");
  EXPECT_EQ(render_string(syl[1].swars), "P");
  EXPECT_DOUBLE_EQ(syl[0].position, 0.0);
  EXPECT_DOUBLE_EQ(syl[1].position, 0.5);
  EXPECT_DOUBLE_EQ(syl[1].span_beats, 0.5);
  EXPECT_EQ(syl[1].beat_index, 0);
}

// Property: serialize(parse(f)) == f for canonical spellings, parsing ignores
// surrounding whitespace, and syllables plus rests cover every beat.
TEST(NotationProperty, RoundTripAndBeatCover) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int bpc = trial % 3 == 0 ? 8 : 16;
    std::string src = header(bpc);
    std::string padded = src;
    const int lines = 1 + static_cast<int>(rng() % 4);
    for (int l = 0; l < lines; ++l) {
      auto [notes, lyrics] = random_line(rng, bpc);
      src += row(notes) + row(lyrics);
      auto spaced = [&](std::vector<std::string> v) {
        for (auto& c : v) c = std::string(rng() % 3, ' ') + c + std::string(rng() % 3, ' ');
        return row(v);
      };
      padded += spaced(notes) + spaced(lyrics);
    }
    const auto score = parse_notation(src);
    ASSERT_EQ(serialize_notation(score), src) << src;
    EXPECT_EQ(serialize_notation(parse_notation(padded)), src);

    for (const auto& line : score.lines) {
      double span = 0.0;
      int allotted = 0;
      bool shared = false;
      for (const auto& s : line.syllables) {
        span += s.span_beats;
        allotted += s.allotted_beats;
        shared = shared || s.span_beats < 1.0;
      }
      EXPECT_NEAR(span + line.rest_count(), bpc, 1e-9);
      if (!shared) {
        EXPECT_EQ(allotted + line.rest_count(), bpc);
      }
      std::set<std::string> labels;
      for (const auto& s : line.syllables) EXPECT_TRUE(labels.insert(s.label).second) << s.label;
      for (std::size_t i = 1; i < line.syllables.size(); ++i)
        EXPECT_LT(line.syllables[i - 1].position, line.syllables[i].position);
    }
  }
}
