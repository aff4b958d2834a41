#include <set>
#include <string>
#include <vector>

namespace persua {

// Built-in English stopword list, version 1. Kept in the repo (not read from
// the environment) so runs are identical across machines. Contraction forms
// appear without apostrophes because normalization deletes apostrophes before
// stopword removal. Mirrored in data/stopwords_en.txt.
const std::set<std::string>& builtin_stopwords() {
    static const std::set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an",
        "and", "any", "are", "arent", "as", "at", "be", "because", "been",
        "before", "being", "below", "between", "both", "but", "by", "can",
        "cannot", "cant", "could", "couldnt", "did", "didnt", "do", "does",
        "doesnt", "doing", "dont", "down", "during", "each", "few", "for",
        "from", "further", "had", "hadnt", "has", "hasnt", "have", "havent",
        "having", "he", "hed", "hell", "her", "here", "heres", "hers",
        "herself", "hes", "him", "himself", "his", "how", "hows", "i", "id",
        "if", "ill", "im", "in", "into", "is", "isnt", "it", "its", "itself",
        "ive", "lets", "me", "more", "most", "my", "myself", "no", "nor",
        "not", "of", "off", "on", "once", "only", "or", "other", "ought",
        "our", "ours", "ourselves", "out", "over", "own", "same", "she",
        "shed", "shell", "shes", "should", "shouldnt", "so", "some", "such",
        "than", "that", "thats", "the", "their", "theirs", "them",
        "themselves", "then", "there", "theres", "these", "they", "theyd",
        "theyll", "theyre", "theyve", "this", "those", "through", "to", "too",
        "under", "until", "up", "very", "was", "wasnt", "we", "wed", "well",
        "were", "werent", "weve", "what", "whats", "when", "whens", "where",
        "wheres", "which", "while", "who", "whom", "whos", "why", "whys",
        "will", "with", "wont", "would", "wouldnt", "you", "youd", "youll",
        "youre", "youve", "your", "yours", "yourself", "yourselves",
    };
    return words;
}

// Abbreviations that a trailing period does not end a sentence after.
// Lowercase, period included. Mirrored in data/abbreviations_en.txt.
const std::vector<std::string>& builtin_abbreviations() {
    static const std::vector<std::string> abbrevs = {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "hon.", "sen.", "rep.", "gov.",
        "jr.", "sr.", "st.", "mt.", "no.", "vs.", "etc.", "e.g.", "i.e.",
        "inc.", "ltd.", "co.", "dept.", "approx.", "est.", "fig.", "a.m.",
        "p.m.", "u.s.", "u.k.",
    };
    return abbrevs;
}

}  // namespace persua
