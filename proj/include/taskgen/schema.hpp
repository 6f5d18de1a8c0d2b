#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace taskgen {

enum class AttributeKind : std::uint8_t { Time, Entity, Categorical, Numerical };

inline constexpr AttributeKind kAllKinds[] = {AttributeKind::Time, AttributeKind::Entity,
                                              AttributeKind::Categorical,
                                              AttributeKind::Numerical};

std::string_view to_string(AttributeKind kind);

/// Upper-cased form used for every attribute name comparison.
std::string canonical_name(std::string_view name);

struct Attribute {
    std::string name;
    AttributeKind kind = AttributeKind::Numerical;

    bool operator==(const Attribute&) const = default;
};

/// Declared attribute set of an event table. Names are stored canonical
/// (upper-cased) and are unique; exactly one attribute has kind Time.
class Schema {
public:
    Schema() = default;
    Schema(std::string name, std::vector<Attribute> attributes, std::string time_format);

    const std::string& name() const noexcept { return name_; }
    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    const std::string& time_format() const noexcept { return time_format_; }

    std::size_t time_index() const noexcept { return time_index_; }
    const Attribute& time_attribute() const { return attributes_.at(time_index_); }

    std::optional<std::size_t> index_of(std::string_view name) const;
    std::optional<AttributeKind> kind_of(std::string_view name) const;
    std::vector<std::string> names_of_kind(AttributeKind kind) const;

    bool operator==(const Schema&) const = default;

private:
    std::string name_;
    std::vector<Attribute> attributes_;
    std::string time_format_;
    std::size_t time_index_ = 0;
};

/// Sidecar document:
/// {"name", "time": {"column", "format"}, "entities", "categorical", "numerical"}
Schema schema_from_json(const nlohmann::json& doc);
nlohmann::json schema_to_json(const Schema& schema);
Schema load_schema(const std::filesystem::path& path);

} // namespace taskgen
