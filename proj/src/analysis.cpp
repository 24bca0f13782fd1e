#include "tsgaudit/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "tsgaudit/ingest.hpp"

namespace tsgaudit {
namespace {

// Action verbs seen in grounding queries. Words that are mostly nouns in
// this domain (book, door, phone, light, box, ...) are left out.
const std::unordered_set<std::string_view>& lexicon() {
  static const std::unordered_set<std::string_view> words = {
      "add", "adjust", "answer", "apply", "arrange", "attach", "awaken", "bake", "balance", "bang",
      "bathe", "beat", "begin", "bend", "bite", "blow", "boil", "bounce", "bowl", "break", "brush",
      "build", "bring", "buy", "call", "carry", "catch", "change", "chase", "check", "cheer", "chew",
      "chop", "clap", "clean", "climb", "close", "collect", "comb", "come", "continue", "cook",
      "cough", "cover", "crawl", "cross", "crouch", "cry", "cut", "dance", "demonstrate", "descend",
      "dig", "dip", "dive", "drag", "draw", "dress", "drink", "drive", "drop", "dry", "dump", "eat",
      "empty", "enter", "exercise", "exit", "explain", "fall", "feed", "fetch", "fight", "fill",
      "find", "finish", "fix", "flip", "float", "fly", "fold", "follow", "gather", "get", "give",
      "glance", "go", "grab", "grasp", "greet", "grin", "grip", "grow", "hang", "help", "hit", "hold",
      "hop", "hug", "hurry", "iron", "jog", "juggle", "jump", "kick", "kiss", "kneel", "knit",
      "knock", "laugh", "lay", "lead", "lean", "leap", "leave", "lie", "lift", "listen", "load",
      "lock", "look", "lower", "make", "measure", "mix", "mop", "move", "nod", "open", "paddle",
      "paint", "pass", "pat", "peel", "perform", "pet", "pick", "place", "play", "point", "polish",
      "pose", "pour", "practice", "prepare", "press", "pull", "pump", "punch", "push", "put",
      "raise", "reach", "read", "relax", "release", "remove", "repair", "rest", "return", "ride",
      "rinse", "roll", "rub", "run", "sand", "scrub", "see", "serve", "sew", "shake", "shave",
      "shoot", "shovel", "show", "shut", "sing", "sit", "skate", "ski", "skip", "sleep", "slice",
      "slide", "smile", "smoke", "snap", "sneeze", "snuggle", "speak", "spin", "splash", "spray",
      "spread", "squat", "stack", "stand", "stare", "start", "stay", "step", "stir", "stop",
      "straighten", "stretch", "strike", "sweep", "swim", "swing", "take", "talk", "tap", "teach",
      "tear", "tell", "throw", "tidy", "tie", "tilt", "toss", "touch", "tuck", "turn", "twist",
      "type", "undress", "unload", "unlock", "use", "vacuum", "wait", "wake", "walk", "wash",
      "watch", "wave", "wear", "wipe", "work", "wrap", "write", "yell"};
  return words;
}

const std::unordered_set<std::string_view>& stoplist() {
  static const std::unordered_set<std::string_view> words = {
      "be", "is", "are", "was", "were", "am", "been", "being", "has", "have", "had", "having",
      "do", "does", "did", "doing", "done"};
  return words;
}

const std::unordered_map<std::string_view, std::string_view>& irregular() {
  static const std::unordered_map<std::string_view, std::string_view> forms = {
      {"ate", "eat"},      {"eaten", "eat"},     {"began", "begin"},   {"begun", "begin"},
      {"bent", "bend"},    {"bit", "bite"},      {"bitten", "bite"},   {"blew", "blow"},
      {"blown", "blow"},   {"broke", "break"},   {"broken", "break"},  {"brought", "bring"},
      {"built", "build"},  {"bought", "buy"},    {"caught", "catch"},  {"came", "come"},
      {"dug", "dig"},      {"drew", "draw"},     {"drawn", "draw"},    {"drank", "drink"},
      {"drunk", "drink"},  {"drove", "drive"},   {"driven", "drive"},  {"fell", "fall"},
      {"fallen", "fall"},  {"fed", "feed"},      {"fought", "fight"},  {"found", "find"},
      {"flew", "fly"},     {"flown", "fly"},     {"got", "get"},       {"gotten", "get"},
      {"gave", "give"},    {"given", "give"},    {"went", "go"},       {"gone", "go"},
      {"grew", "grow"},    {"grown", "grow"},    {"hung", "hang"},     {"held", "hold"},
      {"knelt", "kneel"},  {"laid", "lay"},      {"led", "lead"},      {"leapt", "leap"},
      {"left", "leave"},   {"lain", "lie"},      {"made", "make"},     {"rode", "ride"},
      {"ridden", "ride"},  {"ran", "run"},       {"saw", "see"},       {"seen", "see"},
      {"sewn", "sew"},     {"shook", "shake"},   {"shaken", "shake"},  {"shot", "shoot"},
      {"sang", "sing"},    {"sung", "sing"},     {"sat", "sit"},       {"slept", "sleep"},
      {"slid", "slide"},   {"spoke", "speak"},   {"spoken", "speak"},  {"spun", "spin"},
      {"stood", "stand"},  {"struck", "strike"}, {"swept", "sweep"},   {"swam", "swim"},
      {"swum", "swim"},    {"swung", "swing"},   {"took", "take"},     {"taken", "take"},
      {"taught", "teach"}, {"tore", "tear"},     {"torn", "tear"},     {"told", "tell"},
      {"threw", "throw"},  {"thrown", "throw"},  {"woke", "wake"},     {"woken", "wake"},
      {"wore", "wear"},    {"worn", "wear"},     {"wrote", "write"},   {"written", "write"}};
  return forms;
}

bool known(const std::string& w) { return lexicon().contains(w); }

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// "putt" -> "put", "stopp" -> "stop"; only doubled consonants.
std::optional<std::string> undouble(const std::string& stem) {
  const auto n = stem.size();
  if (n < 3 || stem[n - 1] != stem[n - 2] || is_vowel(stem[n - 1])) return std::nullopt;
  return stem.substr(0, n - 1);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::optional<std::string> first_known(std::initializer_list<std::optional<std::string>> candidates) {
  for (const auto& c : candidates)
    if (c && known(*c)) return c;
  return std::nullopt;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalpha(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

double Histogram::share_above(double threshold) const {
  if (total == 0) return 0.0;
  const auto edge = std::find_if(bin_edges.begin(), bin_edges.end(),
                                 [&](double e) { return std::abs(e - threshold) < 1e-12; });
  if (edge == bin_edges.end()) throw ConfigError("threshold is not a histogram bin edge");
  const auto first_bin = static_cast<std::size_t>(edge - bin_edges.begin());
  std::size_t above = 0;
  for (std::size_t b = first_bin; b < counts.size(); ++b) above += counts[b];
  // Bins are right-open, so [t, next) counts lengths equal to t as "above".
  // That differs from the strict definition only on exact ties.
  return static_cast<double>(above) / static_cast<double>(total);
}

Histogram duration_histogram(std::span<const Sample> samples, int bin_count) {
  if (bin_count < 1) throw ConfigError("histogram needs at least one bin");
  Histogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bin_count) + 1);
  for (int b = 0; b <= bin_count; ++b) h.bin_edges[b] = static_cast<double>(b) / bin_count;
  h.counts.assign(static_cast<std::size_t>(bin_count), 0);
  for (const auto& s : samples) {
    const double len = normalize(s).length();
    auto bin = static_cast<int>(std::floor(len * bin_count));
    bin = std::clamp(bin, 0, bin_count - 1);
    ++h.counts[static_cast<std::size_t>(bin)];
  }
  h.total = samples.size();
  return h;
}

double length_share_above(std::span<const Sample> samples, double threshold) {
  if (samples.empty()) return 0.0;
  const auto above = std::count_if(samples.begin(), samples.end(),
                                   [&](const Sample& s) { return normalize(s).length() > threshold; });
  return static_cast<double>(above) / static_cast<double>(samples.size());
}

std::optional<std::string> lemmatize_verb(std::string_view token) {
  const std::string t(token);
  if (t.empty() || stoplist().contains(t)) return std::nullopt;
  if (const auto it = irregular().find(t); it != irregular().end()) return std::string(it->second);
  if (known(t)) return t;

  const auto cut = [&](std::size_t n) { return t.substr(0, t.size() - n); };
  if (ends_with(t, "ies")) return first_known({cut(3) + "y"});
  if (ends_with(t, "ied")) return first_known({cut(3) + "y"});
  if (ends_with(t, "ying")) return first_known({cut(4) + "ie", cut(3)});
  if (ends_with(t, "ing")) {
    const auto stem = cut(3);
    return first_known({stem, undouble(stem), stem + "e"});
  }
  if (ends_with(t, "ed")) {
    const auto stem = cut(2);
    return first_known({stem, cut(1), undouble(stem)});
  }
  if (ends_with(t, "es")) return first_known({cut(2), cut(1)});
  if (ends_with(t, "s") && !ends_with(t, "ss")) return first_known({cut(1)});
  return std::nullopt;
}

std::vector<std::string> extract_verbs(std::string_view query) {
  std::vector<std::string> verbs;
  for (const auto& token : tokenize(query))
    if (auto lemma = lemmatize_verb(token)) verbs.push_back(std::move(*lemma));
  return verbs;
}

std::vector<std::string> LexiconVerbExtractor::extract(const Sample& sample) const {
  return extract_verbs(sample.query);
}

PrecomputedVerbExtractor::PrecomputedVerbExtractor(const Dataset& dataset, std::istream& verbs) {
  std::string line;
  std::size_t index = 0;
  while (std::getline(verbs, line)) {
    if (index >= dataset.size())
      throw ParseError(index + 1, "more verb lines than dataset samples (" + std::to_string(dataset.size()) + ")");
    std::istringstream words(line);
    std::vector<std::string> list;
    for (std::string w; words >> w;) list.push_back(std::move(w));
    by_id_[dataset.samples[index].sample_id] = std::move(list);
    ++index;
  }
  if (index != dataset.size())
    throw ParseError(index, "verb file has " + std::to_string(index) + " lines but dataset has " +
                                std::to_string(dataset.size()) + " samples");
}

std::vector<std::string> PrecomputedVerbExtractor::extract(const Sample& sample) const {
  const auto it = by_id_.find(sample.sample_id);
  return it == by_id_.end() ? std::vector<std::string>{} : it->second;
}

VerbProfile verb_frequency(std::span<const Sample> samples, std::size_t k, const VerbExtractor& extractor) {
  if (k < 1) throw ConfigError("k must be at least 1");
  std::map<std::string, std::size_t> counts;
  VerbProfile profile;
  for (const auto& s : samples) {
    for (auto& v : extractor.extract(s)) {
      ++counts[std::move(v)];
      ++profile.total_tokens;
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // counts is a std::map, so a stable sort by count keeps lexicographic ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);
  std::size_t covered = 0;
  for (const auto& [verb, count] : ranked) covered += count;
  profile.entries = std::move(ranked);
  profile.coverage = profile.total_tokens == 0
                         ? 0.0
                         : static_cast<double>(covered) / static_cast<double>(profile.total_tokens);
  return profile;
}

}  // namespace tsgaudit
