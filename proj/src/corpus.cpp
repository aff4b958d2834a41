#include "persua/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "persua/error.hpp"
#include "persua/rng.hpp"

namespace persua {

LabelSchema LabelSchema::from_names(std::vector<std::string> names) {
    LabelSchema schema;
    schema.names = std::move(names);
    if (schema.names.empty()) throw ValidationError("label schema must have at least one label");
    for (std::size_t i = 0; i < schema.names.size(); ++i) {
        auto [_, inserted] =
            schema.index.emplace(schema.names[i], static_cast<std::uint32_t>(i));
        if (!inserted)
            throw ValidationError("duplicate label name in schema: " + schema.names[i]);
    }
    return schema;
}

const LabelSchema& LabelSchema::techniques23() {
    static const LabelSchema schema = LabelSchema::from_names({
        "Appeal_to_Authority",
        "Appeal_to_Popularity",
        "Appeal_to_Values",
        "Appeal_to_Fear-Prejudice",
        "Flag_Waving",
        "Causal_Oversimplification",
        "False_Dilemma-No_Choice",
        "Consequential_Oversimplification",
        "Straw_Man",
        "Red_Herring",
        "Whataboutism",
        "Slogans",
        "Appeal_to_Time",
        "Conversation_Killer",
        "Loaded_Language",
        "Repetition",
        "Exaggeration-Minimisation",
        "Obfuscation-Vagueness-Confusion",
        "Name_Calling-Labeling",
        "Doubt",
        "Guilt_by_Association",
        "Appeal_to_Hypocrisy",
        "Questioning_the_Reputation",
    });
    return schema;
}

const LabelSchema& LabelSchema::binary() {
    static const LabelSchema schema = LabelSchema::from_names({"persuasive"});
    return schema;
}

std::uint64_t LabelSchema::id_hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& name : names) {
        for (unsigned char c : name) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= static_cast<unsigned char>('\n');
        h *= 1099511628211ull;
    }
    return h;
}

const char* to_string(BinaryLabel b) {
    return b == BinaryLabel::persuasive ? "persuasive" : "neutral";
}

BinaryLabel binary_label_from_string(const std::string& s) {
    if (s == "persuasive") return BinaryLabel::persuasive;
    if (s == "neutral") return BinaryLabel::neutral;
    throw ParseError("binary label must be 'neutral' or 'persuasive', got '" + s + "'");
}

LabeledSentence binarize(const LabeledSentence& s) {
    LabeledSentence out = s;
    const bool persuasive =
        !s.labels.empty() || (s.binary && *s.binary == BinaryLabel::persuasive);
    out.binary = persuasive ? BinaryLabel::persuasive : BinaryLabel::neutral;
    return out;
}

std::vector<LabeledSentence> binarize(const std::vector<LabeledSentence>& corpus) {
    std::vector<LabeledSentence> out;
    out.reserve(corpus.size());
    for (const auto& s : corpus) out.push_back(binarize(s));
    return out;
}

namespace {

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

}  // namespace

DatasetSplit stratified_split(const std::vector<LabeledSentence>& corpus,
                              double test_fraction, std::uint64_t seed) {
    if (corpus.empty()) throw ValidationError("stratified_split: empty corpus");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("stratified_split: test_fraction must be in (0,1)");

    // Class 0 = neutral, class 1 = persuasive.
    std::vector<std::size_t> members[2];
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus[i].binary)
            throw ValidationError("stratified_split: sentence " + corpus[i].doc_id + "/" +
                                  std::to_string(corpus[i].sentence_id) +
                                  " has no binary label (binarize first)");
        members[static_cast<int>(*corpus[i].binary)].push_back(i);
    }
    for (int c = 0; c < 2; ++c)
        if (!members[c].empty() && members[c].size() < 2)
            throw ValidationError(std::string("stratified_split: class '") +
                                  to_string(static_cast<BinaryLabel>(c)) +
                                  "' has fewer than 2 members, cannot stratify");

    const std::size_t global_target = round_half_up(test_fraction * corpus.size());
    std::size_t take[2];
    for (int c = 0; c < 2; ++c)
        take[c] = round_half_up(test_fraction * members[c].size());

    // Per-class rounding can leave the total off by one; the largest class
    // absorbs the difference so the global test size is exact.
    const std::int64_t diff = static_cast<std::int64_t>(global_target) -
                              static_cast<std::int64_t>(take[0] + take[1]);
    if (diff != 0) {
        const int largest = members[1].size() > members[0].size() ? 1 : 0;
        const std::int64_t adjusted = static_cast<std::int64_t>(take[largest]) + diff;
        take[largest] = static_cast<std::size_t>(
            std::clamp<std::int64_t>(adjusted, 0, static_cast<std::int64_t>(members[largest].size())));
    }

    Rng rng(seed);
    std::set<std::size_t> test_indices;
    for (int c = 0; c < 2; ++c) {
        rng.shuffle(members[c]);
        for (std::size_t k = 0; k < take[c]; ++k) test_indices.insert(members[c][k]);
    }

    DatasetSplit split;
    split.seed = seed;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (test_indices.count(i))
            split.test.push_back(corpus[i]);
        else
            split.train.push_back(corpus[i]);
    }
    return split;
}

double avg_techniques_per_doc(const std::vector<LabeledSentence>& corpus) {
    if (corpus.empty()) throw ValidationError("avg_techniques_per_doc: empty corpus");
    std::set<std::string> docs;
    std::size_t annotations = 0;
    for (const auto& s : corpus) {
        docs.insert(s.doc_id);
        annotations += s.labels.size();
    }
    return static_cast<double>(annotations) / static_cast<double>(docs.size());
}

}  // namespace persua
