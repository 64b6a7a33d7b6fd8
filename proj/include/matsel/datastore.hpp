#pragma once

// Materials database ingestion (CSV), class/attribute fragmentation and the
// scalarized data matrix the metrics run on.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "matsel/core_model.hpp"
#include "matsel/detail/text.hpp"
#include "matsel/error.hpp"

namespace matsel {

class MaterialDatabase {
public:
    MaterialDatabase() = default;

    MaterialDatabase(PropertySchema schema, std::vector<Material> materials)
        : schema_(std::move(schema)), materials_(std::move(materials)) {
        std::unordered_set<std::string_view> ids;
        for (const auto& m : materials_) {
            check_material(schema_, m);
            if (!ids.insert(m.id).second) {
                throw InvalidValue("duplicate material id '" + m.id + "'");
            }
        }
    }

    const PropertySchema& schema() const noexcept { return schema_; }
    const std::vector<Material>& materials() const noexcept { return materials_; }
    std::size_t size() const noexcept { return materials_.size(); }

    std::array<std::size_t, kAllClasses.size()> count_by_class() const {
        std::array<std::size_t, kAllClasses.size()> counts{};
        for (const auto& m : materials_) {
            ++counts[static_cast<std::size_t>(m.material_class)];
        }
        return counts;
    }

    friend bool operator==(const MaterialDatabase&, const MaterialDatabase&) = default;

private:
    PropertySchema schema_;
    std::vector<Material> materials_;
};

struct CsvIssue {
    std::size_t line;  // 1-based file line; the header is line 1
    std::string message;
};

struct CsvReadResult {
    MaterialDatabase database;  // the rows that validated
    std::vector<CsvIssue> issues;

    bool ok() const noexcept { return issues.empty(); }
};

/// CSV layout: header `id,name,class,<prop1>,...,<propM>` in schema order, then one
/// material per line. Numeric cells are decimal literals, interval cells `lo..hi`,
/// ordinal cells scale labels. Comma separated, no quoting. Every problem is
/// collected; rows that fail are left out of the returned database.
inline CsvReadResult read_csv(std::string_view content, const PropertySchema& schema) {
    CsvReadResult result;
    auto lines = detail::split(content, '\n');
    while (!lines.empty() && detail::trim(lines.back()).empty()) {
        lines.pop_back();
    }
    if (lines.empty()) {
        result.issues.push_back({1, "missing header"});
        result.database = MaterialDatabase(schema, {});
        return result;
    }
    if (lines.front().substr(0, 3) == "\xEF\xBB\xBF") {
        lines.front().remove_prefix(3);
    }

    const auto header = detail::split(lines.front(), ',');
    bool header_ok = header.size() == schema.size() + 3 && detail::trim(header[0]) == "id" &&
                     detail::trim(header[1]) == "name" && detail::trim(header[2]) == "class";
    for (std::size_t p = 0; header_ok && p < schema.size(); ++p) {
        header_ok = detail::trim(header[p + 3]) == schema[p].name;
    }
    if (!header_ok) {
        std::string expected = "id,name,class";
        for (const auto& def : schema.properties()) {
            expected += "," + def.name;
        }
        result.issues.push_back({1, "header does not match schema; expected '" + expected + "'"});
        result.database = MaterialDatabase(schema, {});
        return result;
    }

    std::vector<Material> materials;
    std::map<std::string, std::size_t, std::less<>> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const std::string row_tag = "row " + std::to_string(li) + ": ";
        const auto cells = detail::split(lines[li], ',');
        if (cells.size() != schema.size() + 3) {
            result.issues.push_back({line_no, row_tag + "expected " + std::to_string(schema.size() + 3) +
                                                  " cells, found " + std::to_string(cells.size())});
            continue;
        }
        Material m;
        m.id = std::string(detail::trim(cells[0]));
        m.name = std::string(detail::trim(cells[1]));
        bool row_ok = true;
        if (m.id.empty()) {
            result.issues.push_back({line_no, row_tag + "empty id"});
            row_ok = false;
        } else if (const auto [it, fresh] = seen.emplace(m.id, line_no); !fresh) {
            result.issues.push_back({line_no, row_tag + "duplicate id '" + m.id + "' (first on line " +
                                                  std::to_string(it->second) + ")"});
            row_ok = false;
        }
        const auto cls = parse_material_class(detail::trim(cells[2]));
        if (!cls) {
            result.issues.push_back({line_no, row_tag + "unknown class '" + std::string(detail::trim(cells[2])) + "'"});
            row_ok = false;
        } else {
            m.material_class = *cls;
        }
        for (const auto& def : schema.properties()) {
            try {
                m.values.push_back(parse_value(def, cells[def.position + 3]));
            } catch (const InvalidValue& e) {
                result.issues.push_back({line_no, row_tag + e.what()});
                row_ok = false;
            }
        }
        if (row_ok) {
            materials.push_back(std::move(m));
        }
    }
    result.database = MaterialDatabase(schema, std::move(materials));
    return result;
}

/// Strict ingest: the first problem is raised as a LoadError carrying its line.
inline MaterialDatabase ingest_csv(std::string_view content, const PropertySchema& schema) {
    auto result = read_csv(content, schema);
    if (!result.ok()) {
        const auto& first = result.issues.front();
        throw LoadError(first.line, first.message);
    }
    return std::move(result.database);
}

inline std::string serialize_csv(const MaterialDatabase& db) {
    const auto checked = [](const std::string& field) -> const std::string& {
        if (field.find_first_of(",\n\r") != std::string::npos) {
            throw InvalidValue("field '" + field + "' cannot be written to CSV");
        }
        return field;
    };
    std::string out = "id,name,class";
    for (const auto& def : db.schema().properties()) {
        out += ',';
        out += def.name;
    }
    out += '\n';
    for (const auto& m : db.materials()) {
        out += checked(m.id);
        out += ',';
        out += checked(m.name);
        out += ',';
        out += to_string(m.material_class);
        for (const auto& v : m.values) {
            out += ',';
            out += checked(to_text(v));
        }
        out += '\n';
    }
    return out;
}

struct FragmentRow {
    std::string material_id;
    std::vector<PropertyValue> values;  // one per fragment attribute

    friend bool operator==(const FragmentRow&, const FragmentRow&) = default;
};

/// Rows of one class, projected onto the requirement's properties in requirement order.
struct FragmentDatabase {
    MaterialClass material_class = MaterialClass::Polymer;
    std::vector<std::string> attributes;
    std::vector<FragmentRow> rows;

    friend bool operator==(const FragmentDatabase&, const FragmentDatabase&) = default;
};

/// Single pass over the database. Every requirement property must exist in the
/// database schema; a class with no materials gives an empty fragment.
inline FragmentDatabase fragment(const MaterialDatabase& db, MaterialClass cls, const DesignRequirement& req) {
    FragmentDatabase frag;
    frag.material_class = cls;
    std::vector<std::size_t> positions;
    for (const auto& e : req.entries()) {
        const auto* def = db.schema().find(e.property);
        if (def == nullptr) {
            throw PreconditionError("requirement property '" + e.property + "' is not a database attribute");
        }
        frag.attributes.push_back(def->name);
        positions.push_back(def->position);
    }
    for (const auto& m : db.materials()) {
        if (m.material_class != cls) {
            continue;
        }
        FragmentRow row{m.id, {}};
        row.values.reserve(positions.size());
        for (auto p : positions) {
            row.values.push_back(m.values[p]);
        }
        frag.rows.push_back(std::move(row));
    }
    return frag;
}

/// Dense row-major N x n matrix of scalarized fragment values.
class DataMatrix {
public:
    DataMatrix() = default;

    DataMatrix(std::vector<std::string> row_ids, std::vector<std::string> columns, std::vector<double> cells)
        : row_ids_(std::move(row_ids)), columns_(std::move(columns)), cells_(std::move(cells)) {
        if (cells_.size() != row_ids_.size() * columns_.size()) {
            throw PreconditionError("data matrix is not rectangular");
        }
    }

    std::size_t rows() const noexcept { return row_ids_.size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return row_ids_.empty(); }

    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<double>& cells() const noexcept { return cells_; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(cells_).subspan(i * cols(), cols());
    }
    double at(std::size_t i, std::size_t f) const { return cells_.at(i * cols() + f); }

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::vector<std::string> row_ids_;
    std::vector<std::string> columns_;
    std::vector<double> cells_;
};

inline DataMatrix to_matrix(const FragmentDatabase& frag, const PropertySchema& schema) {
    std::vector<const PropertyDef*> defs;
    for (const auto& name : frag.attributes) {
        defs.push_back(&schema.at(name));
    }
    std::vector<std::string> ids;
    std::vector<double> cells;
    ids.reserve(frag.rows.size());
    cells.reserve(frag.rows.size() * defs.size());
    for (const auto& row : frag.rows) {
        if (row.values.size() != defs.size()) {
            throw PreconditionError("fragment row '" + row.material_id + "' has the wrong width");
        }
        ids.push_back(row.material_id);
        for (std::size_t f = 0; f < defs.size(); ++f) {
            cells.push_back(scalarize(*defs[f], row.values[f]));
        }
    }
    return DataMatrix(std::move(ids), frag.attributes, std::move(cells));
}

namespace detail {

// Per-class draw ranges for the synthetic generator. Numeric and ordinal-free
// properties draw uniformly from [lo, hi]; interval properties draw a lower bound
// from [lo, hi] and a width from [width_lo, width_hi].
struct DrawRange {
    double lo;
    double hi;
    double width_lo = 0.0;
    double width_hi = 0.0;
};

using ClassRanges = std::array<DrawRange, kAllClasses.size()>;  // Polymer, Ceramic, Metal

inline const std::map<std::string, ClassRanges, std::less<>>& synthetic_ranges() {
    static const std::map<std::string, ClassRanges, std::less<>> ranges = {
        {"Tensile Strength", {{{10, 120}, {50, 550}, {200, 1500}}}},
        {"Yield Strength", {{{8, 100}, {40, 500}, {150, 1300}}}},
        {"Impact Strength", {{{2, 80}, {1, 6}, {20, 300}}}},
        {"Hardness", {{{5, 110}, {600, 2500}, {130, 480}}}},
        {"Tensile Modulus", {{{500, 9000}, {60000, 450000}, {45000, 250000}}}},
        {"Density", {{{0.9, 1.9, 0, 0.2}, {2.3, 5.8, 0, 0.2}, {2.6, 10.8, 0, 0.2}}}},
        {"Elongation at Break", {{{2, 600}, {0.05, 0.8}, {5, 60}}}},
        {"Flexural Strength", {{{20, 180}, {80, 900}, {250, 1800}}}},
        {"Flexural Modulus", {{{400, 9000}, {60000, 450000}, {45000, 250000}}}},
        {"Compressive Strength", {{{30, 200}, {1000, 4000}, {200, 1600}}}},
        {"Fatigue Strength", {{{5, 60}, {30, 300}, {80, 700}}}},
        {"Melting Point", {{{100, 390}, {1800, 3500}, {420, 1750}}}},
        {"Service Temperature", {{{-60, -20, 80, 270}, {-200, 0, 1000, 1700}, {-200, -50, 350, 1050}}}},
        {"Thermal Conductivity", {{{0.1, 0.5}, {1.5, 9}, {10, 400}}}},
        {"Thermal Expansion", {{{40, 200}, {2, 9}, {8, 25}}}},
        {"Specific Heat", {{{1.0, 2.2}, {0.5, 1.1}, {0.1, 0.9}}}},
        {"Dielectric Strength", {{{12, 40}, {8, 30}, {0, 0.5}}}},
        {"Water Absorption", {{{0.05, 1.5}, {0, 0.04}, {0, 0.01}}}},
        {"Cost", {{{1, 30}, {5, 80}, {0.5, 60}}}},
    };
    return ranges;
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard library's
// distribution implementations so output is identical across toolchains.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double round3(double v) {
    return std::round(v * 1000.0) / 1000.0;
}

inline char class_letter(MaterialClass c) {
    return to_string(c).front();
}

}  // namespace detail

/// Deterministic synthetic database: classes assigned round-robin
/// (Polymer, Ceramic, Metal, ...), values drawn from the per-class ranges above and
/// rounded to three decimals. Properties without a listed range draw from [1, 100].
inline MaterialDatabase generate_synthetic(std::uint64_t seed, std::size_t n_materials, const PropertySchema& schema) {
    if (n_materials < 1) {
        throw PreconditionError("n_materials must be at least 1");
    }
    std::mt19937_64 rng(seed);
    const auto& ranges = detail::synthetic_ranges();
    const std::size_t width = std::max<std::size_t>(4, std::to_string(n_materials).size());

    std::vector<Material> materials;
    materials.reserve(n_materials);
    for (std::size_t i = 0; i < n_materials; ++i) {
        const auto cls = kAllClasses[i % kAllClasses.size()];
        const auto ci = static_cast<std::size_t>(cls);
        auto number = std::to_string(i + 1);
        number.insert(0, width - number.size(), '0');

        Material m;
        m.id = detail::class_letter(cls) + number;
        m.name = "Synthetic " + std::string(to_string(cls)) + " " + number;
        m.material_class = cls;
        for (const auto& def : schema.properties()) {
            const auto it = ranges.find(def.name);
            detail::DrawRange r = it != ranges.end() ? it->second[ci] : detail::DrawRange{1, 100, 0, 10};
            switch (def.kind) {
                case PropertyKind::Numeric:
                    m.values.emplace_back(detail::round3(r.lo + detail::unit_draw(rng) * (r.hi - r.lo)));
                    break;
                case PropertyKind::Interval: {
                    const double lo = detail::round3(r.lo + detail::unit_draw(rng) * (r.hi - r.lo));
                    const double w = detail::round3(r.width_lo + detail::unit_draw(rng) * (r.width_hi - r.width_lo));
                    m.values.emplace_back(Interval{lo, detail::round3(lo + w)});
                    break;
                }
                case PropertyKind::Ordinal: {
                    const auto& scale = def.ordinal_scale;
                    auto k = static_cast<std::size_t>(detail::unit_draw(rng) * static_cast<double>(scale.size()));
                    m.values.emplace_back(OrdinalLabel{scale[std::min(k, scale.size() - 1)].label});
                    break;
                }
            }
        }
        materials.push_back(std::move(m));
    }
    return MaterialDatabase(schema, std::move(materials));
}

}  // namespace matsel
