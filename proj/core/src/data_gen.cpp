#include "xstab/data_gen.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_set>

#include "xstab/errors.hpp"
#include "xstab/rng.hpp"
#include "xstab/text.hpp"

namespace xstab {

namespace {

constexpr std::uint64_t kCorpusSeed = 0x636f72707573ULL;
constexpr std::uint64_t kEmbeddingSeed = 0x766563746f72ULL;
constexpr int kEmbeddingDim = 24;
constexpr double kClusterNoise = 0.1;

// Synonym clusters shared by the corpus templates and the embedding table.
// Members of a cluster land close together in the embedding space, so each
// has in-vocabulary replacement candidates.
const std::vector<std::vector<std::string>>& synonym_clusters() {
  static const std::vector<std::vector<std::string>> clusters = {
      {"love", "adore", "cherish", "enjoy"},
      {"hate", "dislike", "loathe", "despise"},
      {"great", "wonderful", "awesome", "superb"},
      {"terrible", "awful", "horrible", "dreadful"},
      {"happy", "glad", "cheerful", "joyful"},
      {"sad", "gloomy", "unhappy", "miserable"},
      {"dog", "puppy", "hound", "pup"},
      {"cat", "kitten", "feline", "tabby"},
      {"play", "frolic", "romp"},
      {"game", "match", "contest"},
      {"park", "garden", "yard", "meadow"},
      {"morning", "daybreak", "sunrise"},
      {"evening", "dusk", "nightfall"},
      {"friend", "buddy", "pal", "companion"},
      {"fun", "amusing", "entertaining", "delightful"},
      {"boring", "dull", "tedious", "dreary"},
      {"walk", "stroll", "wander"},
      {"run", "sprint", "dash", "jog"},
      {"ball", "toy"},
      {"helpful", "useful", "handy"},
      {"fast", "quick", "swift", "speedy"},
      {"lazy", "idle", "sluggish"},
      {"pain", "ache", "soreness", "cramping"},
      {"bad", "severe", "intense", "harsh"},
      {"head", "temple", "forehead"},
      {"stomach", "belly", "abdomen", "gut"},
      {"rash", "spots", "blotches"},
      {"itchy", "scratchy", "irritated"},
      {"red", "inflamed", "flushed"},
      {"tired", "weary", "fatigued", "exhausted"},
      {"dizzy", "lightheaded", "woozy"},
      {"nausea", "queasiness", "sickness"},
      {"vomiting", "retching", "heaving"},
      {"help", "relieve", "ease", "soothe"},
      {"rest", "sleep", "nap"},
      {"worse", "stronger", "rougher"},
      {"often", "frequently", "constantly", "repeatedly"},
      {"days", "weeks", "months"},
      {"light", "brightness", "glare"},
      {"sound", "noise", "racket"},
      {"eat", "swallow", "digest"},
      {"cream", "lotion", "ointment"},
      {"medicine", "medication", "pills"},
      {"hurts", "aches", "stings"},
      {"spread", "expanded", "widened"},
  };
  return clusters;
}

struct TemplateSet {
  std::string label;
  std::vector<std::string> templates;  // {cluster} placeholders
};

const std::vector<TemplateSet>& short_templates() {
  static const std::vector<TemplateSet> sets = {
      {"pos",
       {
           "i {love} my {dog} ! we {play} in the {park} .",
           "what a {great} {morning} , my {cat} is {happy} .",
           "the {game} was {fun} and my {friend} was {happy} .",
           "my {fast} {dog} can {run} and {play} all day .",
           "we took a {walk} at {morning} and it was {great} .",
           "such a {helpful} {friend} makes every {game} {fun} .",
           "my {cat} is {happy} when we {play} with the {ball} .",
       }},
      {"neg",
       {
           "i {hate} this {boring} {game} , it was {terrible} .",
           "what a {terrible} {evening} , my {dog} is {sad} .",
           "the {game} was {boring} and my {friend} was {sad} .",
           "my {lazy} {cat} will not {run} or {play} today .",
           "we took a {walk} at {evening} and it was {terrible} .",
           "such a {boring} {evening} makes every {friend} {sad} .",
           "i {hate} when my {dog} is {lazy} all {evening} .",
       }},
  };
  return sets;
}

const std::vector<TemplateSet>& medium_templates() {
  static const std::vector<TemplateSet> sets = {
      {"migraine",
       {
           "i have been having {bad} {pain} in my {head} for {days} . {light} "
           "and {sound} make it {worse} and i feel {dizzy} . {rest} does not "
           "{help} .",
           "my {head} has been throbbing {often} since last week . i get "
           "{dizzy} when i stand and the {pain} gets {worse} in bright "
           "{light} . {medicine} does not {help} .",
           "a {bad} {pain} behind my {head} started a few {days} ago . i feel "
           "{tired} and {dizzy} {often} and loud {sound} makes it {worse} . i "
           "want to {rest} .",
       }},
      {"stomach",
       {
           "my {stomach} {hurts} after i {eat} anything . i have {nausea} and "
           "{vomiting} {often} and the cramps are {bad} . {medicine} does not "
           "{help} and i feel {tired} .",
           "a {bad} {pain} fills my {stomach} after every meal . i feel "
           "{nausea} and cannot {eat} without {vomiting} . it has lasted "
           "{days} and nothing seems to {help} .",
           "my {belly} has been upset for {days} with constant {queasiness} . "
           "i can barely {eat} and the {pain} gets {worse} at night . i feel "
           "{weary} and want to {sleep} .",
       }},
      {"skin",
       {
           "i have a {red} {rash} on my arms that is very {itchy} . it has "
           "{spread} across my skin over {days} . the {cream} does not {help} "
           "it .",
           "my skin is {red} and {itchy} with small {spots} everywhere . the "
           "{rash} gets {worse} when it is hot and no {lotion} brings {help} . "
           "it {spread} over two {weeks} .",
           "an {itchy} {rash} {spread} over my neck a few {days} ago . the "
           "skin there is {red} and feels {scratchy} at {evening} . the "
           "{ointment} i bought did not {help} .",
       }},
  };
  return sets;
}

// A placeholder names the cluster member that stands for the whole cluster
// in the template; filling picks any member of that cluster.
const std::map<std::string, std::size_t>& cluster_index() {
  static const std::map<std::string, std::size_t> index = [] {
    std::map<std::string, std::size_t> m;
    for (std::size_t c = 0; c < synonym_clusters().size(); ++c) {
      for (const auto& word : synonym_clusters()[c]) m.emplace(word, c);
    }
    return m;
  }();
  return index;
}

std::string fill_template(const std::string& tmpl, Rng& rng) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      out.push_back(tmpl[i++]);
      continue;
    }
    std::size_t close = tmpl.find('}', i);
    std::string name = tmpl.substr(i + 1, close - i - 1);
    auto it = cluster_index().find(name);
    if (it == cluster_index().end()) {
      throw ParameterError("template names unknown cluster word '" + name + "'");
    }
    const auto& members = synonym_clusters()[it->second];
    out += members[rng.uniform_int(members.size())];
    i = close + 1;
  }
  return out;
}

std::vector<LabeledText> generate(const std::vector<TemplateSet>& sets,
                                  int docs_per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledText> corpus;
  corpus.reserve(sets.size() * static_cast<std::size_t>(docs_per_class));
  // Interleave classes so any prefix of the corpus spans all labels.
  for (int i = 0; i < docs_per_class; ++i) {
    for (const auto& set : sets) {
      const std::string& tmpl = set.templates[i % set.templates.size()];
      corpus.push_back({fill_template(tmpl, rng), set.label});
    }
  }
  return corpus;
}

std::vector<double> random_unit_vector(Rng& rng) {
  std::vector<double> v(kEmbeddingDim);
  double norm_sq = 0.0;
  for (double& x : v) {
    x = rng.gaussian();
    norm_sq += x * x;
  }
  double norm = std::sqrt(norm_sq);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

std::vector<LabeledText> builtin_short_corpus() {
  return generate(short_templates(), 30, mix_seed(kCorpusSeed, 1));
}

std::vector<LabeledText> builtin_medium_corpus() {
  return generate(medium_templates(), 21, mix_seed(kCorpusSeed, 2));
}

std::string builtin_embeddings_text() {
  // Vocabulary: every cluster member, then every other corpus word, in a
  // fixed discovery order so the table is reproducible byte for byte.
  std::vector<std::string> vocabulary;
  std::unordered_set<std::string> seen;
  for (const auto& cluster : synonym_clusters()) {
    for (const auto& word : cluster) {
      if (seen.insert(word).second) vocabulary.push_back(word);
    }
  }
  auto absorb = [&](const std::vector<LabeledText>& corpus) {
    for (const auto& example : corpus) {
      for (const auto& token : tokenize(example.text).tokens) {
        if (is_punctuation_token(token)) continue;
        if (seen.insert(token).second) vocabulary.push_back(token);
      }
    }
  };
  absorb(builtin_short_corpus());
  absorb(builtin_medium_corpus());

  Rng rng(kEmbeddingSeed);
  std::map<std::string, std::vector<double>> table;  // emitted sorted
  for (const auto& cluster : synonym_clusters()) {
    std::vector<double> center = random_unit_vector(rng);
    for (const auto& word : cluster) {
      std::vector<double> v = center;
      for (double& x : v) x += kClusterNoise * rng.gaussian();
      table.emplace(word, std::move(v));
    }
  }
  for (const auto& word : vocabulary) {
    if (!table.contains(word)) table.emplace(word, random_unit_vector(rng));
  }

  std::string out = std::to_string(table.size()) + " " +
                    std::to_string(kEmbeddingDim) + "\n";
  char buf[48];
  for (const auto& [word, vector] : table) {
    out += word;
    for (double x : vector) {
      std::snprintf(buf, sizeof(buf), " %.9g", x);
      out += buf;
    }
    out.push_back('\n');
  }
  return out;
}

EmbeddingStore builtin_embeddings() {
  return parse_embeddings(builtin_embeddings_text(), "builtin");
}

void write_builtin_data(const std::string& directory) {
  std::filesystem::create_directories(directory);
  auto path = [&](const char* name) {
    return (std::filesystem::path(directory) / name).string();
  };
  save_corpus_csv(builtin_short_corpus(), path("short.csv"));
  save_corpus_csv(builtin_medium_corpus(), path("medium.csv"));
  std::ofstream out(path("embeddings.txt"), std::ios::binary);
  if (!out) throw IoError("cannot write embeddings under " + directory);
  out << builtin_embeddings_text();
  if (!out) throw IoError("failed writing embeddings under " + directory);
}

}  // namespace xstab
