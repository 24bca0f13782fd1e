#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "tsgaudit/analysis.hpp"
#include "tsgaudit/ingest.hpp"
#include "tsgaudit/report.hpp"
#include "tsgaudit/synth.hpp"

using namespace tsgaudit;
using testing::make_sample;

TEST_CASE("histogram of identical lengths") {
  std::vector<Sample> samples;
  for (int i = 0; i < 12; ++i) samples.push_back(make_sample("s", "v", 40.0, i, i + 10.0));
  const auto h = duration_histogram(samples, 10);
  REQUIRE(h.bin_edges.size() == 11);
  CHECK(h.total == 12);
  for (std::size_t b = 0; b < 10; ++b) CHECK(h.counts[b] == (b == 2 ? 12u : 0u));
  CHECK(h.share_above(0.3) == 0.0);
  CHECK(h.share_above(0.2) == 1.0);
}

TEST_CASE("histogram edges and tail shares") {
  std::vector<Sample> samples = {make_sample("a", "v", 10, 0, 10),  // 1.0 goes in the last bin
                                 make_sample("b", "v", 10, 0, 3),   // 0.3 opens bin 3
                                 make_sample("c", "v", 10, 0, 5), make_sample("d", "v", 10, 1, 2)};
  const auto h = duration_histogram(samples, 10);
  CHECK(h.counts[9] == 1);
  CHECK(h.counts[3] == 1);
  CHECK(h.counts[5] == 1);
  CHECK(h.counts[1] == 1);
  std::size_t sum = 0;
  for (auto c : h.counts) sum += c;
  CHECK(sum == h.total);
  // Edge values count in the cumulative share but not in the strict one.
  CHECK(h.share_above(0.5) == 0.5);
  CHECK(length_share_above(samples, 0.5) == 0.25);
  CHECK(length_share_above(samples, 0.3) == 0.5);
  CHECK_THROWS(duration_histogram(samples, 0));
}

TEST_CASE("histogram agrees with direct counting on random data") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Sample> samples;
  for (int i = 0; i < 500; ++i) {
    double a = u(gen), b = u(gen);
    if (a > b) std::swap(a, b);
    samples.push_back(make_sample("s", "v", 7.0, a * 7.0, b * 7.0));
  }
  const auto h = duration_histogram(samples, 10);
  for (double t : {0.3, 0.5, 0.7}) {
    std::size_t above = 0;
    for (const auto& s : samples) above += (s.end - s.start) / s.duration > t;
    CHECK(length_share_above(samples, t) == doctest::Approx(above / 500.0));
    CHECK(h.share_above(t) == doctest::Approx(above / 500.0).epsilon(0.01));
  }
}

TEST_CASE("verb extraction examples") {
  CHECK(extract_verbs("a person is putting a book on a shelf") == std::vector<std::string>{"put"});
  CHECK(extract_verbs("").empty());
  CHECK(extract_verbs("the man cooks then cooked again") == std::vector<std::string>{"cook", "cook"});
  CHECK(extract_verbs("Person OPENS the door, closes it.") == std::vector<std::string>{"open", "close"});
  CHECK(extract_verbs("someone was running and sitting") == std::vector<std::string>{"run", "sit"});
  CHECK(extract_verbs("she tidies up and tidied the room") == std::vector<std::string>{"tidy", "tidy"});
  CHECK(extract_verbs("they have done it, do they? does he?").empty());
  CHECK(extract_verbs("the person took a picture then ate") == std::vector<std::string>{"take", "eat"});
}

TEST_CASE("lemmatization is idempotent") {
  for (const char* word : {"putting", "cooks", "closed", "running", "washes", "took", "smiling", "tidies", "ate"}) {
    const auto once = lemmatize_verb(word);
    REQUIRE(once.has_value());
    CHECK(lemmatize_verb(*once) == once);
  }
  CHECK_FALSE(lemmatize_verb("book").has_value());
  CHECK_FALSE(lemmatize_verb("is").has_value());
}

TEST_CASE("verb frequency") {
  std::vector<Sample> samples = {make_sample("a", "v", 1, 0, 1, "a person cooks"),
                                 make_sample("b", "v", 1, 0, 1, "he cooked and cooked"),
                                 make_sample("c", "v", 1, 0, 1, "she runs")};
  const auto top1 = verb_frequency(samples, 1);
  REQUIRE(top1.entries.size() == 1);
  CHECK(top1.entries[0] == std::pair<std::string, std::size_t>{"cook", 3});
  CHECK(top1.total_tokens == 4);
  CHECK(top1.coverage == 0.75);
  const auto all = verb_frequency(samples, 50);
  CHECK(all.entries.size() == 2);
  CHECK(all.coverage == 1.0);
  CHECK_THROWS(verb_frequency(samples, 0));

  // Equal counts fall back to lexicographic order.
  std::vector<Sample> tie = {make_sample("a", "v", 1, 0, 1, "walk run jump")};
  const auto t = verb_frequency(tie, 3);
  CHECK(t.entries[0].first == "jump");
  CHECK(t.entries[1].first == "run");
  CHECK(t.entries[2].first == "walk");
}

TEST_CASE("precomputed verbs") {
  Dataset d;
  d.samples = {make_sample("a", "v", 1, 0, 1, "ignored"), make_sample("b", "v", 1, 0, 1, "ignored")};
  std::istringstream ok("hold sit\n\n");
  const PrecomputedVerbExtractor ex(d, ok);
  CHECK(ex.extract(d.samples[0]) == std::vector<std::string>{"hold", "sit"});
  CHECK(ex.extract(d.samples[1]).empty());
  const auto profile = verb_frequency(d.samples, 5, ex);
  CHECK(profile.total_tokens == 2);
  std::istringstream short_file("hold\n");
  CHECK_THROWS_AS(PrecomputedVerbExtractor(d, short_file), ParseError);
}

TEST_CASE("distribution report on the two-cluster preset") {
  auto config = preset("two-cluster", 11);
  config.videos = 600;
  const auto data = generate(config);
  const auto split = resplit(data, SplitConfig::charades(11));
  ReportOptions options;
  options.grid_resolution = 32;
  options.verb_filter = "cook";
  const auto before = data.samples;
  const auto report = distribution_report(data, &split, options, LexiconVerbExtractor{});
  CHECK(data.samples == before);

  const auto& sections = report["sections"];
  for (auto label : kAllSplits) {
    const auto& sec = sections[std::string(to_string(label))];
    CHECK(sec["samples"].get<std::size_t>() == split.manifest.sample_counts[static_cast<std::size_t>(label)]);
    const auto& hist = sec["histogram"];
    std::size_t sum = 0;
    for (const auto& c : hist["counts"]) sum += c.get<std::size_t>();
    CHECK(sum == sec["samples"].get<std::size_t>());
  }
  const auto argmax = [](const Json& grid) {
    const auto values = grid["values"].get<std::vector<double>>();
    return std::max_element(values.begin(), values.end()) - values.begin();
  };
  CHECK(argmax(sections["training"]["grid"]) != argmax(sections["test_ood"]["grid"]));
  CHECK(sections["training"].contains("verb_conditional"));

  options.verb_filter = "juggle";
  const auto none = distribution_report(data, &split, options, LexiconVerbExtractor{});
  const auto& cond = none["sections"]["training"]["verb_conditional"];
  CHECK(cond["samples"].get<std::size_t>() == 0);
  CHECK(cond.contains("notice"));
  CHECK_FALSE(cond.contains("grid"));

  std::ostringstream hist_csv, verbs_csv;
  write_histogram_csv(report, hist_csv);
  write_verbs_csv(report, verbs_csv);
  CHECK(hist_csv.str().find("test_ood,") != std::string::npos);
  CHECK(verbs_csv.str().find("training,1,") != std::string::npos);
}

TEST_CASE("report without a split and with an empty split") {
  Dataset d;
  for (int i = 0; i < 20; ++i)
    d.samples.push_back(make_sample("s" + std::to_string(i), "v" + std::to_string(i), 10, 1, 4, "a person cooks"));
  ReportOptions options;
  options.grid_resolution = 8;
  const auto whole = distribution_report(d, nullptr, options, LexiconVerbExtractor{});
  CHECK(whole["sections"].contains("all"));
  CHECK(whole["sections"]["all"]["samples"] == 20);

  SplitResult r;
  for (const auto& s : d.samples) r.sample_ids.push_back(s.sample_id);
  r.labels.assign(20, SplitLabel::training);
  r.manifest.sample_counts = {20, 0, 0, 0};
  const auto rep = distribution_report(d, &r, options, LexiconVerbExtractor{});
  CHECK(rep["sections"]["val"].contains("notice"));
  CHECK_FALSE(rep["sections"]["val"].contains("grid"));
}
