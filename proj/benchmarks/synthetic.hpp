#pragma once

#include <random>
#include <string>
#include <vector>

namespace bench {

// Small Python functions with nested control flow; fixed seed so runs compare.
inline std::vector<std::string> synthetic_functions(std::size_t count, unsigned seed = 7) {
    static const char* kVerbs[] = {"count", "sum", "filter", "merge", "parse", "split", "scan", "rank"};
    static const char* kNouns[] = {"words", "lines", "items", "rows", "tokens", "values", "pairs", "keys"};
    std::mt19937 rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string verb = kVerbs[rng() % 8];
        const std::string noun = kNouns[rng() % 8];
        std::string s = "def " + verb + "_" + noun + "_" + std::to_string(i) + "(data, limit=" + std::to_string(rng() % 9) + "):\n";
        s += "    result = []\n";
        const int loops = 1 + static_cast<int>(rng() % 3);
        for (int l = 0; l < loops; ++l) {
            s += "    for x in data:\n";
            s += "        if x > limit:\n";
            s += "            result.append(" + verb + "(x))\n";
            s += "        else:\n";
            s += "            result.append(" + noun + "[x])\n";
        }
        if (rng() % 2) s += "    while result and result[-1] is None:\n        result.pop()\n";
        s += "    return result\n";
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace bench
