#include "support/corpus.hpp"

#include <cctype>

namespace agentslice::testing {

std::vector<FileEntry> property_corpus() {
  return {
      {"src/app/Main.java",
       "package app;\n"
       "\n"
       "import java.util.ArrayList;\n"
       "import java.util.List;\n"
       "\n"
       "public class Main {\n"
       "    static int[] list = new int[2];\n"
       "    private List<String> names = new ArrayList<>();\n"
       "\n"
       "    public static void main(String[] args) {\n"
       "        int total = 0;\n"
       "        for (int i = 0; i < args.length; i++) {\n"
       "            int v = Integer.parseInt(args[i]);\n"
       "            if (v > 0) {\n"
       "                total += v;\n"
       "            } else {\n"
       "                total -= 1;\n"
       "            }\n"
       "            max(v);\n"
       "        }\n"
       "        System.out.println(total + list[0]);\n"
       "    }\n"
       "\n"
       "    static void max(int v) {\n"
       "        if (v > list[0]) {\n"
       "            list[1] = list[0];\n"
       "            list[0] = v;\n"
       "        }\n"
       "    }\n"
       "}\n",
       std::nullopt},
      {"src/app/Util.java",
       "package app;\n"
       "\n"
       "class Util {\n"
       "    static int twice(int x) {\n"
       "        int y = x * 2;\n"
       "        return y;\n"
       "    }\n"
       "\n"
       "    static int clamp(int x, int lo, int hi) {\n"
       "        if (x < lo) return lo;\n"
       "        if (x > hi) return hi;\n"
       "        return x;\n"
       "    }\n"
       "}\n",
       std::nullopt},
      {"tools/calc.py",
       "import math\n"
       "from collections import deque\n"
       "\n"
       "SCALE = 3\n"
       "\n"
       "def area(r):\n"
       "    return math.pi * r * r * SCALE\n"
       "\n"
       "class Stack:\n"
       "    def __init__(self):\n"
       "        self.items = deque()\n"
       "\n"
       "    def push(self, x):\n"
       "        self.items.append(x)\n"
       "        return len(self.items)\n"
       "\n"
       "def main():\n"
       "    s = Stack()\n"
       "    total = 0\n"
       "    for k in range(5):\n"
       "        if k % 2 == 0:\n"
       "            total += s.push(area(k))\n"
       "        else:\n"
       "            total -= 1\n"
       "    print(total, SCALE)\n"
       "\n"
       "main()\n",
       std::nullopt},
  };
}

std::string mutate_whitespace(const std::string& line, std::mt19937& rng) {
  std::uniform_int_distribution<int> coin(0, 9);
  std::uniform_int_distribution<int> indent(0, 12);
  auto blank = [&] {
    std::string s;
    int n = 1 + coin(rng) % 3;
    for (int i = 0; i < n; ++i) s += coin(rng) < 7 ? ' ' : '\t';
    return s;
  };
  std::string out;
  if (coin(rng) < 8) {
    for (int i = indent(rng); i > 0; --i) out += coin(rng) < 8 ? ' ' : '\t';
  }
  std::size_t b = 0;
  while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
  for (std::size_t i = b; i < line.size(); ++i) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      int roll = coin(rng);
      if (roll < 2) {
        // dropped
      } else if (roll < 6) {
        out += ' ';
      } else {
        out += blank();
      }
      i = j - 1;
      continue;
    }
    out += c;
    if (std::ispunct(static_cast<unsigned char>(c)) && i + 1 < line.size() && coin(rng) < 2) {
      out += blank();
    }
  }
  if (coin(rng) < 3) out += blank();
  return out;
}

}  // namespace agentslice::testing

#include <algorithm>
#include <map>
#include <set>

namespace agentslice::testing {

namespace {

std::string spaceless(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

}  // namespace

FuzzOutcome alignment_fuzz(int cases, unsigned seed) {
  auto ws = load_workspace(property_corpus());
  LineLocator locator(ws);
  std::map<std::string, int> uses;
  for (const auto& f : ws.files()) {
    for (int n = 1; n <= f.line_count(); ++n) ++uses[spaceless(f.line(n))];
  }
  std::vector<std::pair<std::string, int>> eligible;
  for (const auto& f : ws.files()) {
    for (int n = 1; n <= f.line_count(); ++n) {
      auto key = spaceless(f.line(n));
      if (!key.empty() && uses[key] == 1) eligible.emplace_back(f.path(), n);
    }
  }

  std::mt19937 rng(seed);
  FuzzOutcome outcome;
  for (int c = 0; c < cases; ++c) {
    ++outcome.cases;
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    auto crit_ref = eligible[pick(rng)];
    auto criterion = make_criterion(ws, crit_ref.first, crit_ref.second);
    std::set<std::pair<std::string, int>> chosen{crit_ref};
    int size = 1 + static_cast<int>(rng() % 14);
    while (static_cast<int>(chosen.size()) < size) chosen.insert(eligible[pick(rng)]);

    std::vector<RawLine> raw;
    for (const auto& [file, line] : chosen) {
      std::optional<std::string> hint;
      switch (rng() % 3) {
        case 0: hint = file; break;
        case 1: hint = file.substr(file.rfind('/') + 1); break;
        default: break;
      }
      raw.push_back({hint, mutate_whitespace(ws.file(file).line(line), rng)});
    }
    auto [slice, report] = align_text_to_slice(raw, locator, nullptr, nullptr, criterion);
    std::set<std::pair<std::string, int>> got;
    for (const auto& r : slice.refs()) got.insert(r);
    if (got != chosen || !report.hallucinated.empty()) {
      ++outcome.failures;
      if (outcome.first_failure.empty()) {
        outcome.first_failure = "case " + std::to_string(c) + ": first raw line '" +
                                raw.front().text + "'";
      }
    }
  }
  return outcome;
}

}  // namespace agentslice::testing
