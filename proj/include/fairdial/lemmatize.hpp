//
// Copyright 2026 The fairdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef FAIRDIAL_LEMMATIZE_HPP_
#define FAIRDIAL_LEMMATIZE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace fairdial {

namespace detail {

inline const std::unordered_map<std::string_view, std::string_view>&
irregular_lemmas() {
  static const std::unordered_map<std::string_view, std::string_view> kTable = {
      // nouns
      {"men", "man"}, {"women", "woman"}, {"children", "child"},
      {"feet", "foot"}, {"teeth", "tooth"}, {"mice", "mouse"},
      {"geese", "goose"}, {"oxen", "ox"}, {"lice", "louse"},
      {"wives", "wife"}, {"knives", "knife"}, {"lives", "life"},
      {"wolves", "wolf"}, {"halves", "half"}, {"shelves", "shelf"},
      {"thieves", "thief"}, {"loaves", "loaf"}, {"calves", "calf"},
      {"selves", "self"}, {"elves", "elf"}, {"leaves", "leave"},
      {"shoes", "shoe"}, {"toes", "toe"}, {"canoes", "canoe"},
      {"businessmen", "businessman"}, {"businesswomen", "businesswoman"},
      {"policemen", "policeman"}, {"policewomen", "policewoman"},
      {"chairmen", "chairman"}, {"chairwomen", "chairwoman"},
      {"congressmen", "congressman"}, {"congresswomen", "congresswoman"},
      {"milkmen", "milkman"}, {"gentlemen", "gentleman"},
      // verbs
      {"am", "be"}, {"is", "be"}, {"are", "be"}, {"was", "be"},
      {"were", "be"}, {"been", "be"}, {"has", "have"}, {"had", "have"},
      {"does", "do"}, {"did", "do"}, {"done", "do"}, {"went", "go"},
      {"gone", "go"}, {"made", "make"}, {"said", "say"}, {"took", "take"},
      {"taken", "take"}, {"gave", "give"}, {"given", "give"},
      {"came", "come"}, {"saw", "see"}, {"seen", "see"}, {"ate", "eat"},
      {"eaten", "eat"}, {"wrote", "write"}, {"written", "write"},
      {"got", "get"}, {"gotten", "get"}, {"thought", "think"},
      {"bought", "buy"}, {"brought", "bring"}, {"caught", "catch"},
      {"taught", "teach"}, {"told", "tell"}, {"felt", "feel"},
      {"kept", "keep"}, {"left", "leave"}, {"lost", "lose"}, {"met", "meet"},
      {"paid", "pay"}, {"sent", "send"}, {"sold", "sell"}, {"spent", "spend"},
      {"stood", "stand"}, {"understood", "understand"}, {"knew", "know"},
      {"known", "know"}, {"grew", "grow"}, {"grown", "grow"},
      {"drew", "draw"}, {"drawn", "draw"}, {"threw", "throw"},
      {"thrown", "throw"}, {"flew", "fly"}, {"flown", "fly"},
      {"began", "begin"}, {"begun", "begin"}, {"sang", "sing"},
      {"sung", "sing"}, {"ran", "run"}, {"swam", "swim"}, {"swum", "swim"},
      {"drank", "drink"}, {"drunk", "drink"}, {"forgot", "forget"},
      {"forgotten", "forget"}, {"found", "find"}, {"heard", "hear"},
      {"held", "hold"}, {"led", "lead"}, {"meant", "mean"}, {"sat", "sit"},
      {"spoke", "speak"}, {"spoken", "speak"}, {"broke", "break"},
      {"broken", "break"}, {"chose", "choose"}, {"chosen", "choose"},
      {"fell", "fall"}, {"fallen", "fall"}, {"drove", "drive"},
      {"driven", "drive"}, {"rode", "ride"}, {"ridden", "ride"},
      {"woke", "wake"}, {"woken", "wake"}, {"won", "win"},
      {"built", "build"}, {"slept", "sleep"}, {"fought", "fight"},
      {"sought", "seek"}, {"wore", "wear"}, {"worn", "wear"},
      {"hid", "hide"}, {"hidden", "hide"}, {"shot", "shoot"},
      {"became", "become"}, {"felled", "fell"}, {"dying", "die"},
      {"lying", "lie"}, {"tying", "tie"}, {"used", "use"},
  };
  return kTable;
}

// Nouns whose -ing or -ed ending is not an inflection.
inline const std::unordered_set<std::string_view>& suffix_exceptions() {
  static const std::unordered_set<std::string_view> kWords = {
      "morning", "evening", "nothing", "something", "anything",
      "everything", "wedding", "sibling", "darling", "ceiling", "pudding",
      "offspring", "during", "earring", "duckling", "viking", "sterling",
      "herring", "awning", "shilling", "bed", "red", "hundred", "kindred",
      "sacred", "naked", "wicked", "beloved", "indeed", "wretched",
  };
  return kWords;
}

inline bool is_vowel_at(std::string_view w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return true;
    case 'y':
      return i > 0 && !is_vowel_at(w, i - 1);
    default:
      return false;
  }
}

inline bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel_at(w, i)) return true;
  }
  return false;
}

// Number of vowel-consonant sequences (the classic stemmer "measure").
inline int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel_at(w, i);
    if (!v && prev_vowel) ++m;
    prev_vowel = v;
  }
  return m;
}

// Stem ends consonant-vowel-consonant, the last consonant not w, x or y.
inline bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel_at(w, n - 1) && is_vowel_at(w, n - 2) &&
         !is_vowel_at(w, n - 3) && last != 'w' && last != 'x' && last != 'y';
}

// Restores the silent 'e' or undoes consonant doubling after -ing / -ed.
inline std::string repair_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel_at(stem, n - 1)) {
    const char c = stem[n - 1];
    if (c != 'l' && c != 's' && c != 'z') stem.pop_back();
    return stem;
  }
  if (stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz")) {
    return stem + "e";
  }
  if (n >= 2 && (stem[n - 1] == 'v' || stem[n - 1] == 'c')) return stem + "e";
  if (n >= 2 && (stem[n - 1] == 's' || stem[n - 1] == 'z') &&
      is_vowel_at(stem, n - 2)) {
    return stem + "e";
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return stem + "e";
  return stem;
}

}  // namespace detail

// Rule-based English lemmatizer: irregular-form table first, then one
// suffix rule (-ies, -es, -s, -ing, -ed). Tokens with digits or apostrophes
// are returned unchanged.
inline std::string lemmatize(std::string_view token) {
  std::string w(token);
  for (const char c : w) {
    if (c < 'a' || c > 'z') return w;
  }
  if (const auto& t = detail::irregular_lemmas(); t.contains(w)) {
    return std::string(t.at(w));
  }
  if (detail::suffix_exceptions().contains(w)) return w;
  const std::size_t n = w.size();

  if (w.ends_with("ies") && n > 4) return w.substr(0, n - 3) + "y";
  if (w.ends_with("ied") && n > 4) return w.substr(0, n - 3) + "y";
  if (w.ends_with("ied")) return w.substr(0, n - 1);  // died -> die

  if (w.ends_with("es") && n >= 4) {
    const std::string_view stem(w.data(), n - 2);
    if (stem.ends_with("ss") || stem.ends_with("x") || stem.ends_with("ch") ||
        stem.ends_with("sh") || stem.ends_with("zz")) {
      return std::string(stem);
    }
    if (stem.ends_with("o") && stem.size() >= 2 &&
        !detail::is_vowel_at(stem, stem.size() - 2)) {
      return std::string(stem);
    }
  }
  if (w.ends_with("s") && n >= 4 && !w.ends_with("ss") && !w.ends_with("us") &&
      !w.ends_with("is")) {
    return w.substr(0, n - 1);
  }
  if (w.ends_with("ing") && n >= 5) {
    const std::string stem = w.substr(0, n - 3);
    if (detail::has_vowel(stem)) return detail::repair_stem(stem);
    return w;
  }
  if (w.ends_with("ed") && n >= 5 && !w.ends_with("eed")) {
    const std::string stem = w.substr(0, n - 2);
    if (detail::has_vowel(stem)) return detail::repair_stem(stem);
    return w;
  }
  return w;
}

}  // namespace fairdial

#endif  // FAIRDIAL_LEMMATIZE_HPP_
