#pragma once

// Declarative decision rules and the index-based classifier that maps a design
// requirement onto a material class.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matsel/core_model.hpp"
#include "matsel/detail/text.hpp"
#include "matsel/error.hpp"

namespace matsel {

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Between };

inline std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::Less: return "<";
        case Comparator::LessEqual: return "<=";
        case Comparator::Greater: return ">";
        case Comparator::GreaterEqual: return ">=";
        case Comparator::Between: return "between";
    }
    return "?";
}

inline std::optional<Comparator> parse_comparator(std::string_view s) {
    if (s == "<") return Comparator::Less;
    if (s == "<=") return Comparator::LessEqual;
    if (s == ">") return Comparator::Greater;
    if (s == ">=") return Comparator::GreaterEqual;
    if (s == "between") return Comparator::Between;
    return std::nullopt;
}

/// `property cmp threshold`, or `property between lo hi` (inclusive on both ends).
struct Condition {
    std::string property;
    Comparator comparator = Comparator::Less;
    double threshold = 0.0;
    double upper = 0.0;  // only for Between

    bool holds(double v) const {
        switch (comparator) {
            case Comparator::Less: return v < threshold;
            case Comparator::LessEqual: return v <= threshold;
            case Comparator::Greater: return v > threshold;
            case Comparator::GreaterEqual: return v >= threshold;
            case Comparator::Between: return threshold <= v && v <= upper;
        }
        return false;
    }

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// Conjunction of conditions voting for one class.
struct DecisionRule {
    int id = 0;
    MaterialClass target = MaterialClass::Polymer;
    std::vector<Condition> conditions;

    friend bool operator==(const DecisionRule&, const DecisionRule&) = default;
};

class Knowledgebase {
public:
    /// Validates the rule set against `schema`: unique ids, known properties,
    /// ordered `between` bounds, and every class targeted by at least one rule.
    Knowledgebase(std::vector<DecisionRule> rules, const PropertySchema& schema) : rules_(std::move(rules)) {
        std::set<int> ids;
        std::array<int, kAllClasses.size()> per_class{};
        for (const auto& rule : rules_) {
            if (!ids.insert(rule.id).second) {
                throw PreconditionError("duplicate rule id " + std::to_string(rule.id));
            }
            if (rule.conditions.empty()) {
                throw PreconditionError("rule " + std::to_string(rule.id) + " has no conditions");
            }
            for (const auto& c : rule.conditions) {
                if (schema.find(c.property) == nullptr) {
                    throw PreconditionError("rule " + std::to_string(rule.id) + ": unknown property '" + c.property + "'");
                }
                if (c.comparator == Comparator::Between && !(c.threshold <= c.upper)) {
                    throw PreconditionError("rule " + std::to_string(rule.id) + ": between requires lo <= hi");
                }
            }
            ++per_class[static_cast<std::size_t>(rule.target)];
        }
        for (auto c : kAllClasses) {
            if (per_class[static_cast<std::size_t>(c)] == 0) {
                throw PreconditionError("class " + std::string(to_string(c)) + " is the target of no rule");
            }
        }
    }

    const std::vector<DecisionRule>& rules() const noexcept { return rules_; }
    std::size_t size() const noexcept { return rules_.size(); }

private:
    std::vector<DecisionRule> rules_;
};

/// Rules file grammar, one rule per line, `#` starts a comment:
///
///     rule <id> => <Polymer|Ceramic|Metal> when <cond> [and <cond>]...
///     <cond> := <property> <|<=|>|>= <number>
///             | <property> between <lo> <hi>
///
/// Property names may contain single spaces; tokens are whitespace separated.
inline Knowledgebase load_knowledgebase(std::string_view text, const PropertySchema& schema) {
    std::vector<DecisionRule> rules;
    std::map<int, std::size_t> first_line;
    std::array<std::size_t, kAllClasses.size()> last_line_for_class{};
    std::size_t last_line = 0;

    for (const auto& line : detail::content_lines(text)) {
        last_line = line.number;
        const auto fail = [&](const std::string& what) { throw LoadError(line.number, what); };
        const auto tokens = detail::split_ws(line.text);
        if (tokens.size() < 6 || tokens[0] != "rule" || tokens[2] != "=>" || tokens[4] != "when") {
            fail("expected 'rule <id> => <class> when <conditions>'");
        }
        DecisionRule rule;
        const auto id = detail::parse_number(tokens[1]);
        if (!id || *id != static_cast<double>(static_cast<int>(*id))) {
            fail("rule id must be an integer, got '" + std::string(tokens[1]) + "'");
        }
        rule.id = static_cast<int>(*id);
        if (const auto [it, fresh] = first_line.emplace(rule.id, line.number); !fresh) {
            fail("duplicate rule id " + std::to_string(rule.id) + " (first defined on line " +
                 std::to_string(it->second) + ")");
        }
        const auto target = parse_material_class(tokens[3]);
        if (!target) {
            fail("unknown material class '" + std::string(tokens[3]) + "'");
        }
        rule.target = *target;

        std::size_t i = 5;
        while (true) {
            Condition cond;
            std::string name;
            while (i < tokens.size() && !parse_comparator(tokens[i])) {
                if (!name.empty()) {
                    name += ' ';
                }
                name += tokens[i++];
            }
            if (name.empty()) {
                fail("condition is missing a property name");
            }
            if (i == tokens.size()) {
                fail("condition on '" + name + "' is missing a comparator");
            }
            if (schema.find(name) == nullptr) {
                fail("unknown property '" + name + "'");
            }
            cond.property = name;
            cond.comparator = *parse_comparator(tokens[i++]);
            const std::size_t arity = cond.comparator == Comparator::Between ? 2 : 1;
            if (i + arity > tokens.size()) {
                fail("condition on '" + name + "' is missing its threshold");
            }
            const auto a = detail::parse_number(tokens[i]);
            const auto b = arity == 2 ? detail::parse_number(tokens[i + 1]) : a;
            if (!a || !b) {
                fail("malformed threshold in condition on '" + name + "'");
            }
            i += arity;
            cond.threshold = *a;
            cond.upper = *b;
            if (cond.comparator == Comparator::Between && cond.threshold > cond.upper) {
                fail("between requires lo <= hi on '" + name + "'");
            }
            rule.conditions.push_back(std::move(cond));
            if (i == tokens.size()) {
                break;
            }
            if (tokens[i] != "and" || i + 1 == tokens.size()) {
                fail("expected 'and <condition>' after '" + std::string(tokens[i - 1]) + "'");
            }
            ++i;
        }
        last_line_for_class[static_cast<std::size_t>(rule.target)] = line.number;
        rules.push_back(std::move(rule));
    }
    for (auto c : kAllClasses) {
        if (last_line_for_class[static_cast<std::size_t>(c)] == 0) {
            throw LoadError(last_line, "class " + std::string(to_string(c)) + " is the target of no rule");
        }
    }
    return Knowledgebase(std::move(rules), schema);
}

/// Text of the shipped 23-rule knowledgebase (also installed as data/rules23.txt).
inline std::string_view default_rules_text() {
    return R"(# Default 23-rule knowledgebase.
# rule <id> => <class> when <property> <cmp> <number> [and ...]

# Polymers: low strength and stiffness, light, low melting, insulating.
rule 1 => Polymer when Tensile Strength < 150
rule 2 => Polymer when Tensile Modulus < 10000
rule 3 => Polymer when Density < 2.2
rule 4 => Polymer when Melting Point < 400
rule 5 => Polymer when Thermal Conductivity < 1
rule 6 => Polymer when Hardness < 120 and Tensile Strength < 150
rule 7 => Polymer when Thermal Expansion >= 30
rule 8 => Polymer when Water Absorption >= 0.05 and Dielectric Strength >= 10

# Ceramics: stiff, hard, brittle, refractory.
rule 9 => Ceramic when Tensile Modulus >= 50000 and Elongation at Break < 1
rule 10 => Ceramic when Hardness >= 550
rule 11 => Ceramic when Melting Point >= 1800
rule 12 => Ceramic when Compressive Strength >= 1000 and Tensile Strength < 600
rule 13 => Ceramic when Elongation at Break < 1
rule 14 => Ceramic when Thermal Expansion < 10 and Thermal Conductivity < 10
rule 15 => Ceramic when Dielectric Strength >= 5 and Melting Point >= 1500

# Metals: stiff, ductile, tough, conductive.
rule 16 => Metal when Tensile Modulus >= 40000 and Elongation at Break >= 2
rule 17 => Metal when Thermal Conductivity >= 10
rule 18 => Metal when Yield Strength >= 150 and Elongation at Break >= 2
rule 19 => Metal when Impact Strength >= 20 and Tensile Modulus >= 40000
rule 20 => Metal when Hardness between 120 500 and Tensile Modulus >= 40000
rule 21 => Metal when Melting Point between 400 1800 and Density >= 2.5
rule 22 => Metal when Dielectric Strength < 1
rule 23 => Metal when Tensile Strength >= 200 and Tensile Modulus >= 40000
)";
}

inline const Knowledgebase& default_knowledgebase() {
    static const Knowledgebase kb = load_knowledgebase(default_rules_text(), default_schema());
    return kb;
}

/// One node of a class list: property name and its schema index.
struct ClassNode {
    std::string property;
    std::size_t index;

    friend bool operator==(const ClassNode&, const ClassNode&) = default;
};

struct ClassificationResult {
    MaterialClass material_class = MaterialClass::Polymer;
    std::vector<int> index_pattern;                 // ids of every satisfied rule, ascending
    std::vector<ClassNode> node_list;               // requirement order
    std::array<int, kAllClasses.size()> scores{};   // satisfied rules per class, canonical order

    friend bool operator==(const ClassificationResult&, const ClassificationResult&) = default;
};

/// A rule that applied to the requirement but did not fire.
struct NearMiss {
    int rule_id;
    MaterialClass target;
    std::size_t satisfied;
    std::size_t total;
};

class UnclassifiableRequirement : public Unclassifiable {
public:
    UnclassifiableRequirement(const std::string& what, std::vector<NearMiss> misses)
        : Unclassifiable(what), misses_(std::move(misses)) {}

    const std::vector<NearMiss>& nearest_misses() const noexcept { return misses_; }

private:
    std::vector<NearMiss> misses_;
};

/// Evaluates every rule whose properties all appear in `req` (others are skipped),
/// counts satisfied rules per class and returns the class with the highest count.
/// Ties go to the earlier class in Polymer < Ceramic < Metal.
inline ClassificationResult classify(const DesignRequirement& req, const Knowledgebase& kb,
                                     const PropertySchema& schema) {
    if (req.size() == 0) {
        throw PreconditionError("design requirement is empty");
    }
    ClassificationResult result;
    std::map<std::string_view, double> values;
    for (const auto& e : req.entries()) {
        const auto& def = schema.at(e.property);
        values.emplace(def.name, scalarize(def, e.value));
        result.node_list.push_back({def.name, def.position});
    }

    std::vector<NearMiss> misses;
    for (const auto& rule : kb.rules()) {
        std::size_t satisfied = 0;
        bool applicable = true;
        for (const auto& c : rule.conditions) {
            const auto it = values.find(c.property);
            if (it == values.end()) {
                applicable = false;
                break;
            }
            satisfied += c.holds(it->second) ? 1 : 0;
        }
        if (!applicable) {
            continue;
        }
        if (satisfied == rule.conditions.size()) {
            result.index_pattern.push_back(rule.id);
            ++result.scores[static_cast<std::size_t>(rule.target)];
        } else {
            misses.push_back({rule.id, rule.target, satisfied, rule.conditions.size()});
        }
    }
    std::sort(result.index_pattern.begin(), result.index_pattern.end());

    if (result.index_pattern.empty()) {
        // Closest misses first: highest satisfied fraction, then lowest id.
        std::sort(misses.begin(), misses.end(), [](const NearMiss& a, const NearMiss& b) {
            const auto lhs = a.satisfied * b.total;
            const auto rhs = b.satisfied * a.total;
            return lhs != rhs ? lhs > rhs : a.rule_id < b.rule_id;
        });
        if (misses.size() > 5) {
            misses.resize(5);
        }
        std::string what = "unclassifiable requirement: no rule satisfied";
        if (misses.empty()) {
            what += "; no rule applies to the given properties";
        } else {
            what += "; nearest misses:";
            for (const auto& m : misses) {
                what += " rule " + std::to_string(m.rule_id) + " (" + std::string(to_string(m.target)) + ", " +
                        std::to_string(m.satisfied) + "/" + std::to_string(m.total) + ")";
            }
        }
        throw UnclassifiableRequirement(what, std::move(misses));
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < result.scores.size(); ++c) {
        if (result.scores[c] > result.scores[best]) {
            best = c;
        }
    }
    result.material_class = kAllClasses[best];
    return result;
}

}  // namespace matsel
