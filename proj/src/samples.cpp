#include "foldcert/samples.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace foldcert {

void SampledVectorField::validate() const {
    if (dim < 1) throw DimensionMismatch("phase dimension must be positive");
    if (lipschitz_bound < 0.0 || !std::isfinite(lipschitz_bound))
        throw MalformedInput("lipschitz bound must be a nonnegative real");
    for (size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (s.x.size() != dim || s.f.size() != dim)
            throw DimensionMismatch("sample " + std::to_string(i) +
                                    " has vectors of wrong length");
        if (!(s.lambda >= 0.0 && s.lambda <= 1.0))
            throw OutOfRangeLambda("sample " + std::to_string(i) +
                                   " has lambda outside [0,1]");
        for (int k = 0; k < dim; ++k)
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.f[k]))
                throw MalformedInput("sample " + std::to_string(i) + " is not finite");
        for (size_t j = 0; j < i; ++j) {
            if (samples[j].lambda == s.lambda && samples[j].x == s.x)
                throw MalformedInput("duplicate sample location at index " +
                                     std::to_string(i));
        }
    }
}

namespace {

std::vector<double> parse_reals(const std::string& chunk, size_t line_no) {
    std::istringstream is(chunk);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw MalformedInput("line " + std::to_string(line_no) +
                                 ": cannot parse real '" + tok + "'");
        }
    }
    return out;
}

}  // namespace

SampledVectorField parse_samples(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    size_t line_no = 0;
    SampledVectorField svf;

    // header
    bool have_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream hs(line);
        std::string dim_kv, lip_kv;
        if (!(hs >> dim_kv >> lip_kv) || dim_kv.rfind("dim=", 0) != 0 ||
            lip_kv.rfind("lipschitz=", 0) != 0)
            throw MalformedInput("line " + std::to_string(line_no) +
                                 ": expected header 'dim=<n> lipschitz=<L>'");
        try {
            svf.dim = std::stoi(dim_kv.substr(4));
            svf.lipschitz_bound = std::stod(lip_kv.substr(10));
        } catch (const std::exception&) {
            throw MalformedInput("line " + std::to_string(line_no) + ": bad header value");
        }
        have_header = true;
        break;
    }
    if (!have_header) throw MalformedInput("missing header line");
    if (svf.dim < 1) throw DimensionMismatch("header dim must be positive");

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> parts;
        size_t start = 0;
        for (size_t p = line.find(';'); p != std::string::npos;
             p = line.find(';', start)) {
            parts.push_back(line.substr(start, p - start));
            start = p + 1;
        }
        parts.push_back(line.substr(start));
        if (parts.size() != 3)
            throw MalformedInput("line " + std::to_string(line_no) +
                                 ": expected 'x ; lambda ; f'");
        auto xs = parse_reals(parts[0], line_no);
        auto ls = parse_reals(parts[1], line_no);
        auto fs = parse_reals(parts[2], line_no);
        if (static_cast<int>(xs.size()) != svf.dim ||
            static_cast<int>(fs.size()) != svf.dim)
            throw DimensionMismatch("line " + std::to_string(line_no) +
                                    ": vector length does not match dim=" +
                                    std::to_string(svf.dim));
        if (ls.size() != 1)
            throw MalformedInput("line " + std::to_string(line_no) +
                                 ": lambda field must hold one real");
        if (!(ls[0] >= 0.0 && ls[0] <= 1.0))
            throw OutOfRangeLambda("line " + std::to_string(line_no) +
                                   ": lambda outside [0,1]");
        SampledVectorField::Sample s;
        s.x = Eigen::Map<Vec>(xs.data(), xs.size());
        s.lambda = ls[0];
        s.f = Eigen::Map<Vec>(fs.data(), fs.size());
        svf.samples.push_back(std::move(s));
    }
    svf.validate();
    return svf;
}

std::string serialize_samples(const SampledVectorField& svf) {
    std::ostringstream os;
    os << "dim=" << svf.dim << " lipschitz=" << format_real(svf.lipschitz_bound) << "\n";
    for (const auto& s : svf.samples) {
        for (int k = 0; k < svf.dim; ++k) os << (k ? " " : "") << format_real(s.x[k]);
        os << " ; " << format_real(s.lambda) << " ; ";
        for (int k = 0; k < svf.dim; ++k) os << (k ? " " : "") << format_real(s.f[k]);
        os << "\n";
    }
    return os.str();
}

SampledVectorField load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open sample file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_samples(buf.str());
}

void save_samples(const SampledVectorField& svf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write sample file: " + path);
    out << serialize_samples(svf);
}

}  // namespace foldcert
