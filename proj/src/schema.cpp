#include "taskgen/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "taskgen/errors.hpp"

namespace taskgen {

std::string_view to_string(AttributeKind kind) {
    switch (kind) {
    case AttributeKind::Time: return "time";
    case AttributeKind::Entity: return "entity";
    case AttributeKind::Categorical: return "categorical";
    case AttributeKind::Numerical: return "numerical";
    }
    return "?";
}

std::string canonical_name(std::string_view name) {
    std::string out(name);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

Schema::Schema(std::string name, std::vector<Attribute> attributes, std::string time_format)
    : name_(std::move(name)), attributes_(std::move(attributes)), time_format_(std::move(time_format)) {
    std::set<std::string> seen;
    std::size_t time_count = 0;
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        auto& attr = attributes_[i];
        attr.name = canonical_name(attr.name);
        if (attr.name.empty()) throw SchemaError("empty attribute name");
        if (!seen.insert(attr.name).second) throw SchemaError("duplicate attribute: " + attr.name);
        if (attr.kind == AttributeKind::Time) {
            ++time_count;
            time_index_ = i;
        }
    }
    if (time_count == 0) throw NoTimeColumn();
    if (time_count > 1) throw SchemaError("more than one time attribute");
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    const std::string key = canonical_name(name);
    for (std::size_t i = 0; i < attributes_.size(); ++i)
        if (attributes_[i].name == key) return i;
    return std::nullopt;
}

std::optional<AttributeKind> Schema::kind_of(std::string_view name) const {
    if (auto i = index_of(name)) return attributes_[*i].kind;
    return std::nullopt;
}

std::vector<std::string> Schema::names_of_kind(AttributeKind kind) const {
    std::vector<std::string> out;
    for (const auto& a : attributes_)
        if (a.kind == kind) out.push_back(a.name);
    return out;
}

namespace {

std::vector<std::string> string_list(const nlohmann::json& doc, const char* key) {
    std::vector<std::string> out;
    if (!doc.contains(key)) return out;
    const auto& arr = doc.at(key);
    if (!arr.is_array()) throw SchemaError(std::string("sidecar field '") + key + "' must be an array");
    for (const auto& v : arr) {
        if (!v.is_string()) throw SchemaError(std::string("sidecar field '") + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

Schema schema_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw SchemaError("sidecar must be a JSON object");
    if (!doc.contains("time") || !doc["time"].is_object() || !doc["time"].contains("column"))
        throw NoTimeColumn();
    const auto& time = doc["time"];
    std::vector<Attribute> attrs;
    attrs.push_back({time.at("column").get<std::string>(), AttributeKind::Time});
    for (auto& n : string_list(doc, "entities")) attrs.push_back({n, AttributeKind::Entity});
    for (auto& n : string_list(doc, "categorical")) attrs.push_back({n, AttributeKind::Categorical});
    for (auto& n : string_list(doc, "numerical")) attrs.push_back({n, AttributeKind::Numerical});
    return Schema(doc.value("name", std::string("dataset")), std::move(attrs),
                  time.value("format", std::string("%Y-%m-%d")));
}

nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json doc;
    doc["name"] = schema.name();
    doc["time"] = {{"column", schema.time_attribute().name}, {"format", schema.time_format()}};
    doc["entities"] = schema.names_of_kind(AttributeKind::Entity);
    doc["categorical"] = schema.names_of_kind(AttributeKind::Categorical);
    doc["numerical"] = schema.names_of_kind(AttributeKind::Numerical);
    return doc;
}

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open schema sidecar: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("malformed schema sidecar: " + std::string(e.what()));
    }
    return schema_from_json(doc);
}

} // namespace taskgen
