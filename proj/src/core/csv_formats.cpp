#include "core/csv_formats.hpp"

#include "core/errors.hpp"
#include "core/table_io.hpp"

namespace railenv {

namespace {

std::string label_field(const std::optional<EnvironmentClass>& label) {
    return label ? class_name(*label) : unlabeled_token;
}

std::optional<EnvironmentClass> parse_label_field(const std::string& field,
                                                  const std::string& ctx) {
    if (field == unlabeled_token) return std::nullopt;
    const auto label = parse_class(field);
    if (!label) throw_input(ctx + ": unknown class '" + field + "'");
    return label;
}

}  // namespace

void write_residuals_csv(const std::string& path, const std::vector<ResidualRecord>& records,
                         const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.header(residuals_csv_header);
    for (const auto& r : records) {
        w.row({std::to_string(r.time.week), tableio::fmt(r.time.sow), to_string(r.sat),
               r.band_code, tableio::fmt(r.epsilon_m), tableio::fmt(r.elevation_rad),
               tableio::fmt(r.azimuth_rad), r.cn0_dbhz ? tableio::fmt(*r.cn0_dbhz) : "",
               label_field(r.label)});
    }
}

std::vector<ResidualRecord> read_residuals_csv(const std::string& path) {
    tableio::CsvReader r(path, residuals_csv_header);
    std::vector<ResidualRecord> records;
    while (auto row = r.next_row()) {
        const auto& f = *row;
        const std::string ctx = path + ":" + std::to_string(r.line_number());
        ResidualRecord rec;
        rec.time = {static_cast<int>(tableio::parse_long(f[0], ctx)),
                    tableio::parse_double(f[1], ctx)};
        const auto sat = parse_satellite_id(f[2]);
        if (!sat) throw_input(ctx + ": bad satellite id '" + f[2] + "'");
        rec.sat = *sat;
        rec.band_code = f[3];
        rec.epsilon_m = tableio::parse_double(f[4], ctx);
        rec.elevation_rad = tableio::parse_double(f[5], ctx);
        rec.azimuth_rad = tableio::parse_double(f[6], ctx);
        if (!f[7].empty()) rec.cn0_dbhz = tableio::parse_double(f[7], ctx);
        rec.label = parse_label_field(f[8], ctx);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_features_csv(const std::string& path, const FeatureTable& table,
                        const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    std::string header;
    for (const auto& name : table.names) header += name + ",";
    header += "class";
    w.header(header);
    for (size_t i = 0; i < table.vectors.size(); ++i) {
        const FeatureVector& fv = table.vectors[i];
        std::vector<std::string> fields;
        fields.reserve(table.names.size() + 1);
        for (size_t f = 0; f < table.names.size(); ++f)
            fields.push_back(fv.mask[f] ? tableio::fmt(fv.values[f]) : "");
        fields.push_back(label_field(table.labels[i]));
        w.row(fields);
    }
}

FeatureTable read_features_csv(const std::string& path) {
    tableio::CsvReader r(path, "");
    const auto& header = r.header();
    if (header.size() < 2 || header.back() != "class")
        throw_input(path + ": not a feature table (want <features...>,class)");

    FeatureTable table;
    table.names.assign(header.begin(), header.end() - 1);
    while (auto row = r.next_row()) {
        const auto& f = *row;
        const std::string ctx = path + ":" + std::to_string(r.line_number());
        FeatureVector fv;
        fv.values.assign(table.names.size(), 0.0);
        fv.mask.assign(table.names.size(), false);
        for (size_t k = 0; k < table.names.size(); ++k) {
            const std::string& field = f[k];
            if (field.empty()) continue;
            fv.values[k] = tableio::parse_double(field, ctx);
            fv.mask[k] = true;
        }
        table.labels.push_back(parse_label_field(f.back(), ctx));
        table.vectors.push_back(std::move(fv));
    }
    return table;
}

void write_stream_csv(const std::string& path, const std::vector<SampledError>& stream,
                      const std::vector<std::pair<std::string, std::string>>& comments) {
    tableio::CsvWriter w(path);
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.header(stream_csv_header);
    for (const auto& s : stream) {
        w.row({std::to_string(s.time.week), tableio::fmt(s.time.sow), to_string(s.sat),
               s.band_code, label_field(s.label), s.error_m ? tableio::fmt(*s.error_m) : ""});
    }
}

}  // namespace railenv
