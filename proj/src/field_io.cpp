#include "riemfpp/field_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace riemfpp {

using nlohmann::json;

void save_field(const ScalarField& field, const std::string& base_path) {
    {
        std::ofstream bin(base_path + ".bin", std::ios::binary);
        if (!bin) throw Error("cannot write " + base_path + ".bin");
        bin.write(reinterpret_cast<const char*>(field.values.data()),
                  std::streamsize(field.values.size() * sizeof(double)));
    }
    json j;
    j["dimension"] = field.grid.dimension;
    j["origin"] = std::vector<double>(field.grid.origin.begin(),
                                      field.grid.origin.begin() + field.grid.dimension);
    j["extent"] = std::vector<double>(field.grid.extent.begin(),
                                      field.grid.extent.begin() + field.grid.dimension);
    j["spacing"] = field.grid.spacing;
    j["seed"] = field.seed;
    j["covariance"] = {{"kind", field.covariance.kind_name()},
                       {"variance", field.covariance.variance},
                       {"range", field.covariance.range}};
    if (field.covariance.kind == CovarianceModel::Kind::Tabulated) {
        j["covariance"]["knots_r"] = field.covariance.knots_r;
        j["covariance"]["knots_c"] = field.covariance.knots_c;
    }
    std::ofstream hdr(base_path + ".json");
    if (!hdr) throw Error("cannot write " + base_path + ".json");
    hdr << j.dump(2) << "\n";
}

ScalarField load_field(const std::string& base_path) {
    std::ifstream hdr(base_path + ".json");
    if (!hdr) throw Error("cannot read " + base_path + ".json");
    json j = json::parse(hdr);

    int d = j.at("dimension").get<int>();
    Point origin{}, extent{};
    auto jo = j.at("origin");
    auto je = j.at("extent");
    for (int i = 0; i < d; ++i) {
        origin[i] = jo.at(i).get<double>();
        extent[i] = je.at(i).get<double>();
    }
    GridSpec grid(d, origin, extent, j.at("spacing").get<double>());

    std::ifstream bin(base_path + ".bin", std::ios::binary);
    if (!bin) throw Error("cannot read " + base_path + ".bin");
    std::vector<double> values(size_t(grid.node_count()));
    bin.read(reinterpret_cast<char*>(values.data()),
             std::streamsize(values.size() * sizeof(double)));
    if (!bin) throw Error("binary field file too short: " + base_path + ".bin");

    ScalarField field(grid, std::move(values));
    field.seed = j.value("seed", uint64_t(0));
    auto jc = j.at("covariance");
    auto kind = CovarianceModel::kind_from_name(jc.at("kind").get<std::string>());
    if (kind == CovarianceModel::Kind::Tabulated) {
        field.covariance = CovarianceModel::tabulated(jc.at("knots_r").get<std::vector<double>>(),
                                                      jc.at("knots_c").get<std::vector<double>>());
    } else {
        field.covariance.kind = kind;
        field.covariance.variance = jc.at("variance").get<double>();
        field.covariance.range = jc.at("range").get<double>();
    }
    return field;
}

void export_field_csv(const ScalarField& field, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw Error("cannot write " + path);
    const int d = field.grid.dimension;
    std::fprintf(f, d == 2 ? "x,y,value\n" : "x,y,z,value\n");
    int64_t n = field.grid.node_count();
    for (int64_t k = 0; k < n; ++k) {
        auto idx = field.grid.unflatten(k);
        Point p = field.grid.node_position(idx);
        if (d == 2)
            std::fprintf(f, "%.17g,%.17g,%.17g\n", p[0], p[1], field.values[size_t(k)]);
        else
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", p[0], p[1], p[2], field.values[size_t(k)]);
    }
    std::fclose(f);
}

}  // namespace riemfpp
