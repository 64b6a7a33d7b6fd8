#pragma once

// Property schema, mixed-type property values, materials and design requirements,
// plus the rules that scalarize every value kind onto the real line.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "matsel/detail/text.hpp"
#include "matsel/error.hpp"

namespace matsel {

enum class PropertyKind { Numeric, Interval, Ordinal };

inline std::string_view to_string(PropertyKind kind) {
    switch (kind) {
        case PropertyKind::Numeric: return "numeric";
        case PropertyKind::Interval: return "interval";
        case PropertyKind::Ordinal: return "ordinal";
    }
    return "?";
}

inline std::optional<PropertyKind> parse_property_kind(std::string_view s) {
    if (s == "numeric") return PropertyKind::Numeric;
    if (s == "interval") return PropertyKind::Interval;
    if (s == "ordinal") return PropertyKind::Ordinal;
    return std::nullopt;
}

struct OrdinalLevel {
    std::string label;
    double weight;

    friend bool operator==(const OrdinalLevel&, const OrdinalLevel&) = default;
};

/// Poor=1 .. Excellent=5, used by ordinal properties that declare no scale of their own.
inline std::vector<OrdinalLevel> default_ordinal_scale() {
    return {{"Poor", 1.0}, {"Fair", 2.0}, {"Good", 3.0}, {"Very Good", 4.0}, {"Excellent", 5.0}};
}

struct PropertyDef {
    std::string name;
    PropertyKind kind = PropertyKind::Numeric;
    std::string unit;
    std::vector<OrdinalLevel> ordinal_scale;  // non-empty iff kind == Ordinal
    std::size_t position = 0;

    friend bool operator==(const PropertyDef&, const PropertyDef&) = default;
};

struct Interval {
    double lo;
    double hi;

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct OrdinalLabel {
    std::string label;

    friend bool operator==(const OrdinalLabel&, const OrdinalLabel&) = default;
};

/// Exactly one of: a plain real, a closed range, or a label from an ordinal scale.
using PropertyValue = std::variant<double, Interval, OrdinalLabel>;

/// Text form accepted back by parse_value: `2000`, `0.23..0.56`, `Good`.
inline std::string to_text(const PropertyValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return detail::format_number(v);
            } else if constexpr (std::is_same_v<T, Interval>) {
                return detail::format_number(v.lo) + ".." + detail::format_number(v.hi);
            } else {
                return v.label;
            }
        },
        value);
}

/// Ordered, validated list of property definitions.
class PropertySchema {
public:
    PropertySchema() = default;

    /// Validates names (unique, usable in every text format) and ordinal scales;
    /// positions are reassigned to 0..m-1 in list order.
    explicit PropertySchema(std::vector<PropertyDef> properties) : properties_(std::move(properties)) {
        for (std::size_t i = 0; i < properties_.size(); ++i) {
            auto& def = properties_[i];
            def.position = i;
            validate_name(def.name);
            if (!index_.emplace(def.name, i).second) {
                throw InvalidValue("duplicate property name '" + def.name + "'");
            }
            if (def.kind == PropertyKind::Ordinal) {
                if (def.ordinal_scale.empty()) {
                    throw InvalidValue("ordinal property '" + def.name + "' has an empty scale");
                }
                for (std::size_t k = 0; k < def.ordinal_scale.size(); ++k) {
                    const auto& level = def.ordinal_scale[k];
                    if (level.label.empty() || !std::isfinite(level.weight)) {
                        throw InvalidValue("ordinal property '" + def.name + "' has a malformed level");
                    }
                    for (std::size_t j = 0; j < k; ++j) {
                        if (def.ordinal_scale[j].label == level.label) {
                            throw InvalidValue("ordinal property '" + def.name + "' repeats label '" + level.label + "'");
                        }
                    }
                    if (k > 0 && !(def.ordinal_scale[k - 1].weight < level.weight)) {
                        throw InvalidValue("ordinal scale of '" + def.name + "' is not strictly increasing");
                    }
                }
            } else if (!def.ordinal_scale.empty()) {
                throw InvalidValue("non-ordinal property '" + def.name + "' declares a scale");
            }
        }
    }

    std::size_t size() const noexcept { return properties_.size(); }
    bool empty() const noexcept { return properties_.empty(); }
    const std::vector<PropertyDef>& properties() const noexcept { return properties_; }
    const PropertyDef& operator[](std::size_t position) const { return properties_.at(position); }

    const PropertyDef* find(std::string_view name) const {
        const auto it = index_.find(std::string(name));
        return it == index_.end() ? nullptr : &properties_[it->second];
    }

    const PropertyDef& at(std::string_view name) const {
        if (const auto* def = find(name)) {
            return *def;
        }
        throw InvalidValue("unknown property '" + std::string(name) + "'");
    }

    bool operator==(const PropertySchema& other) const { return properties_ == other.properties_; }

private:
    static void validate_name(const std::string& name) {
        if (name.empty() || detail::trim(name) != name) {
            throw InvalidValue("property name '" + name + "' is empty or padded");
        }
        if (name.find_first_of(",=|#\t") != std::string::npos || name.find("  ") != std::string::npos) {
            throw InvalidValue("property name '" + name + "' contains a reserved character");
        }
        for (auto word : detail::split_ws(name)) {
            if (word == "<" || word == "<=" || word == ">" || word == ">=" || word == "between") {
                throw InvalidValue("property name '" + name + "' contains the reserved word '" + std::string(word) + "'");
            }
        }
    }

    std::vector<PropertyDef> properties_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Schema file grammar, one record per line, `#` starts a comment:
///
///     <name> | numeric  | <unit>
///     <name> | interval | <unit>
///     <name> | ordinal  | <unit> [| <label>=<weight>, <label>=<weight>, ...]
///
/// An ordinal record without a scale field gets default_ordinal_scale().
inline PropertySchema parse_schema(std::string_view text) {
    std::vector<PropertyDef> defs;
    for (const auto& line : detail::content_lines(text)) {
        const auto fields = detail::split(line.text, '|');
        if (fields.size() < 3 || fields.size() > 4) {
            throw LoadError(line.number, "expected 'name | kind | unit [| scale]'");
        }
        PropertyDef def;
        def.name = std::string(detail::trim(fields[0]));
        const auto kind = parse_property_kind(detail::trim(fields[1]));
        if (!kind) {
            throw LoadError(line.number, "unknown property kind '" + std::string(detail::trim(fields[1])) + "'");
        }
        def.kind = *kind;
        def.unit = std::string(detail::trim(fields[2]));
        if (fields.size() == 4) {
            if (def.kind != PropertyKind::Ordinal) {
                throw LoadError(line.number, "scale given for non-ordinal property '" + def.name + "'");
            }
            for (auto item : detail::split(fields[3], ',')) {
                const auto eq = item.find('=');
                if (eq == std::string_view::npos) {
                    throw LoadError(line.number, "scale level must be 'label=weight'");
                }
                const auto weight = detail::parse_number(item.substr(eq + 1));
                if (!weight) {
                    throw LoadError(line.number, "bad scale weight '" + std::string(detail::trim(item.substr(eq + 1))) + "'");
                }
                def.ordinal_scale.push_back({std::string(detail::trim(item.substr(0, eq))), *weight});
            }
        } else if (def.kind == PropertyKind::Ordinal) {
            def.ordinal_scale = default_ordinal_scale();
        }
        defs.push_back(std::move(def));
    }
    try {
        return PropertySchema(std::move(defs));
    } catch (const InvalidValue& e) {
        throw LoadError(0, e.what());
    }
}

/// Text of the shipped 23-property schema (also installed as data/schema23.txt).
/// The first five properties are the ones a polymer requirement typically names;
/// the other eighteen are representative physical, mechanical, thermal, electrical,
/// chemical and economic properties chosen for this tool.
inline std::string_view default_schema_text() {
    return R"(# Default 23-property materials schema.
# name | kind | unit [| ordinal scale]
Tensile Strength | numeric | MPa
Yield Strength | numeric | MPa
Impact Strength | numeric | kJ/m2
Hardness | numeric | HV
Tensile Modulus | numeric | MPa
Density | interval | g/cm3
Elongation at Break | numeric | %
Flexural Strength | numeric | MPa
Flexural Modulus | numeric | MPa
Compressive Strength | numeric | MPa
Fatigue Strength | numeric | MPa
Melting Point | numeric | degC
Service Temperature | interval | degC
Thermal Conductivity | numeric | W/m.K
Thermal Expansion | numeric | um/m.K
Specific Heat | numeric | J/g.K
Dielectric Strength | numeric | kV/mm
Water Absorption | numeric | %
Cost | numeric | USD/kg
Corrosion Resistance | ordinal | - | Poor=1, Fair=2, Good=3, Very Good=4, Excellent=5
Chemical Resistance | ordinal | - | Poor=1, Fair=2, Good=3, Very Good=4, Excellent=5
Machinability | ordinal | - | Poor=1, Fair=2, Good=3, Very Good=4, Excellent=5
Wear Resistance | ordinal | - | Poor=1, Fair=2, Good=3, Very Good=4, Excellent=5
)";
}

inline const PropertySchema& default_schema() {
    static const PropertySchema schema = parse_schema(default_schema_text());
    return schema;
}

enum class MaterialClass { Polymer, Ceramic, Metal };

/// Canonical order; also the tie-break order.
inline constexpr std::array<MaterialClass, 3> kAllClasses = {MaterialClass::Polymer, MaterialClass::Ceramic,
                                                             MaterialClass::Metal};

inline std::string_view to_string(MaterialClass c) {
    switch (c) {
        case MaterialClass::Polymer: return "Polymer";
        case MaterialClass::Ceramic: return "Ceramic";
        case MaterialClass::Metal: return "Metal";
    }
    return "?";
}

inline std::optional<MaterialClass> parse_material_class(std::string_view s) {
    for (auto c : kAllClasses) {
        if (to_string(c) == s) {
            return c;
        }
    }
    return std::nullopt;
}

/// Weight of `label` in an ordinal property's scale.
inline double encode_ordinal(const PropertyDef& def, std::string_view label) {
    if (def.kind != PropertyKind::Ordinal) {
        throw InvalidValue("property '" + def.name + "' is not ordinal");
    }
    for (const auto& level : def.ordinal_scale) {
        if (level.label == label) {
            return level.weight;
        }
    }
    throw InvalidValue("property '" + def.name + "': unknown ordinal label '" + std::string(label) + "'");
}

/// Throws InvalidValue unless `value` is well-formed for `def`.
inline void check_value(const PropertyDef& def, const PropertyValue& value) {
    switch (def.kind) {
        case PropertyKind::Numeric:
            if (const auto* v = std::get_if<double>(&value); v && std::isfinite(*v)) {
                return;
            }
            throw InvalidValue("property '" + def.name + "' expects a finite number");
        case PropertyKind::Interval:
            if (const auto* v = std::get_if<Interval>(&value)) {
                if (!std::isfinite(v->lo) || !std::isfinite(v->hi)) {
                    throw InvalidValue("property '" + def.name + "': interval bounds must be finite");
                }
                if (v->lo > v->hi) {
                    throw InvalidValue("property '" + def.name + "': interval lo > hi");
                }
                return;
            }
            throw InvalidValue("property '" + def.name + "' expects an interval lo..hi");
        case PropertyKind::Ordinal:
            if (const auto* v = std::get_if<OrdinalLabel>(&value)) {
                encode_ordinal(def, v->label);
                return;
            }
            throw InvalidValue("property '" + def.name + "' expects an ordinal label");
    }
}

/// Numeric -> itself, interval -> midpoint, ordinal -> scale weight.
inline double scalarize(const PropertyDef& def, const PropertyValue& value) {
    check_value(def, value);
    switch (def.kind) {
        case PropertyKind::Numeric: return std::get<double>(value);
        case PropertyKind::Interval: {
            const auto& iv = std::get<Interval>(value);
            return (iv.lo + iv.hi) / 2.0;
        }
        case PropertyKind::Ordinal: return encode_ordinal(def, std::get<OrdinalLabel>(value).label);
    }
    return 0.0;
}

/// Parses the cell syntax shared by CSV files and requirement files.
/// Interval properties also accept a single number `a`, read as `a..a`.
inline PropertyValue parse_value(const PropertyDef& def, std::string_view text) {
    text = detail::trim(text);
    PropertyValue value;
    switch (def.kind) {
        case PropertyKind::Numeric: {
            const auto v = detail::parse_number(text);
            if (!v) {
                throw InvalidValue("property '" + def.name + "': unparsable number '" + std::string(text) + "'");
            }
            value = *v;
            break;
        }
        case PropertyKind::Interval: {
            const auto sep = text.find("..");
            const auto lo = detail::parse_number(text.substr(0, sep));
            const auto hi = sep == std::string_view::npos ? lo : detail::parse_number(text.substr(sep + 2));
            if (!lo || !hi) {
                throw InvalidValue("property '" + def.name + "': unparsable interval '" + std::string(text) + "'");
            }
            value = Interval{*lo, *hi};
            break;
        }
        case PropertyKind::Ordinal: value = OrdinalLabel{std::string(text)}; break;
    }
    check_value(def, value);
    return value;
}

struct Material {
    std::string id;
    std::string name;
    MaterialClass material_class = MaterialClass::Polymer;
    std::vector<PropertyValue> values;  // schema order, one per property

    const PropertyValue& value(const PropertyDef& def) const { return values.at(def.position); }

    friend bool operator==(const Material&, const Material&) = default;
};

/// Throws InvalidValue unless `m` carries exactly one well-typed value per schema property.
inline void check_material(const PropertySchema& schema, const Material& m) {
    if (m.id.empty()) {
        throw InvalidValue("material id is empty");
    }
    if (m.values.size() != schema.size()) {
        throw InvalidValue("material '" + m.id + "' has " + std::to_string(m.values.size()) + " values, schema has " +
                           std::to_string(schema.size()));
    }
    for (const auto& def : schema.properties()) {
        check_value(def, m.values[def.position]);
    }
}

struct RequirementEntry {
    std::string property;
    PropertyValue value;

    friend bool operator==(const RequirementEntry&, const RequirementEntry&) = default;
};

/// The engineer's ordered, partial property specification. Entry order fixes the
/// column order of every fragment built from it.
class DesignRequirement {
public:
    DesignRequirement() = default;

    DesignRequirement(const PropertySchema& schema, std::vector<RequirementEntry> entries)
        : entries_(std::move(entries)) {
        if (entries_.empty()) {
            throw PreconditionError("design requirement is empty");
        }
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            check_value(schema.at(entries_[i].property), entries_[i].value);
            for (std::size_t j = 0; j < i; ++j) {
                if (entries_[j].property == entries_[i].property) {
                    throw InvalidValue("property '" + entries_[i].property + "' given twice");
                }
            }
        }
    }

    const std::vector<RequirementEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    const PropertyValue* find(std::string_view property) const {
        for (const auto& e : entries_) {
            if (e.property == property) {
                return &e.value;
            }
        }
        return nullptr;
    }

    /// Scalarized values in entry order.
    std::vector<double> query_vector(const PropertySchema& schema) const {
        std::vector<double> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) {
            out.push_back(scalarize(schema.at(e.property), e.value));
        }
        return out;
    }

    friend bool operator==(const DesignRequirement&, const DesignRequirement&) = default;

private:
    std::vector<RequirementEntry> entries_;
};

namespace detail {

inline RequirementEntry parse_requirement_pair(const PropertySchema& schema, std::string_view pair) {
    const auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
        throw InvalidValue("expected '<property> = <value>', got '" + std::string(trim(pair)) + "'");
    }
    const auto name = trim(pair.substr(0, eq));
    const auto& def = schema.at(name);
    return {def.name, parse_value(def, pair.substr(eq + 1))};
}

}  // namespace detail

/// Requirement file: one `<property> = <value>` per line, order significant, `#` comments.
inline DesignRequirement parse_requirement(const PropertySchema& schema, std::string_view text) {
    std::vector<RequirementEntry> entries;
    for (const auto& line : detail::content_lines(text)) {
        try {
            entries.push_back(detail::parse_requirement_pair(schema, line.text));
        } catch (const InvalidValue& e) {
            throw LoadError(line.number, e.what());
        }
    }
    return DesignRequirement(schema, std::move(entries));
}

/// Inline form `Tensile Strength=20,Hardness=56.67`.
inline DesignRequirement parse_requirement_inline(const PropertySchema& schema, std::string_view text) {
    std::vector<RequirementEntry> entries;
    if (!detail::trim(text).empty()) {
        for (auto pair : detail::split(text, ',')) {
            entries.push_back(detail::parse_requirement_pair(schema, pair));
        }
    }
    return DesignRequirement(schema, std::move(entries));
}

}  // namespace matsel
