#include "common/schema.hpp"

#include "common/text.hpp"

namespace geoagent {

bool TableSchema::has_column(std::string_view column) const {
    for (const auto& c : columns)
        if (iequals(c.name, column)) return true;
    return false;
}

const TableSchema* SchemaSnapshot::find(std::string_view table) const {
    for (const auto& t : tables)
        if (iequals(t.name, table)) return &t;
    return nullptr;
}

}  // namespace geoagent
