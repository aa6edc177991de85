#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "common/value.hpp"

namespace geoagent {

struct ColumnInfo {
    std::string name;
    std::string type;
};

struct TableSchema {
    std::string name;
    std::vector<ColumnInfo> columns;
    std::vector<Row> samples;  // at most three, insertion order

    bool has_column(std::string_view column) const;
};

struct SchemaSnapshot {
    std::vector<TableSchema> tables;

    const TableSchema* find(std::string_view table) const;
};

}  // namespace geoagent
