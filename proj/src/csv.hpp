#ifndef CURATOR_SRC_CSV_HPP
#define CURATOR_SRC_CSV_HPP

#include <string>
#include <vector>

namespace curator::detail {

// Minimal RFC-4180-ish line splitter: double-quoted fields with "" escapes,
// no embedded newlines.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace curator::detail

#endif // CURATOR_SRC_CSV_HPP
