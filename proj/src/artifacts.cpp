#include "foldcert/artifacts.hpp"

#include <fstream>
#include <sstream>

namespace foldcert {

namespace {

double parse_double(const std::string& tok, const std::string& what) {
    try {
        return std::stod(tok);
    } catch (const std::exception&) {
        throw MalformedInput("cannot parse real '" + tok + "' in " + what);
    }
}

int parse_int(const std::string& tok, const std::string& what) {
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw MalformedInput("cannot parse integer '" + tok + "' in " + what);
    }
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

std::string role_name(FaceRole r) { return to_string(r); }

FaceRole role_from(const std::string& s) {
    if (s == "entrance") return FaceRole::Entrance;
    if (s == "exit") return FaceRole::Exit;
    if (s == "tangency") return FaceRole::Tangency;
    throw MalformedInput("unknown face role: " + s);
}

std::string sign_name(Sign s) { return to_string(s); }

Sign sign_from(const std::string& s) {
    if (s == "Positive") return Sign::Positive;
    if (s == "Negative") return Sign::Negative;
    if (s == "Undetermined") return Sign::Undetermined;
    throw MalformedInput("unknown sign: " + s);
}

}  // namespace

std::string write_assumption_report(const AssumptionReport& rep) {
    std::ostringstream os;
    os << "foldcert/assumptions v1\n";
    os << "verdict " << (rep.certified ? "Certified" : "NotCertified") << "\n";
    if (!rep.certified) os << "first_failure " << rep.first_failure << "\n";
    for (const auto& e : rep.entries) {
        os << "entry name=[" << e.name << "] present=" << (e.present ? 1 : 0)
           << " sign=" << sign_name(e.cert.sign) << " margin="
           << format_real(e.cert.margin) << " samples=" << e.cert.sample_count
           << " h=" << format_real(e.cert.covering_radius) << " quantity=["
           << e.cert.quantity << "] face=[" << e.cert.face << "]\n";
    }
    return os.str();
}

namespace {

void write_block(std::ostream& os, const std::string& name, const IsolatingBlock& b) {
    os << "begin_block " << name << "\n";
    for (const auto& cell : b.region.cells) {
        os << "cell";
        for (int v : cell) os << " " << v;
        os << "\n";
    }
    for (const auto& f : b.faces) {
        os << "face " << f.axis << " " << f.side << " " << f.node_index << " "
           << format_real(f.coordinate) << " " << role_name(f.role) << " "
           << sign_name(f.cert.sign) << " " << format_real(f.cert.margin) << " "
           << f.cert.sample_count << " " << format_real(f.cert.covering_radius) << " "
           << format_real(f.lambda_range.lo) << " " << format_real(f.lambda_range.hi)
           << " " << (f.flow_through_assumed ? 1 : 0) << " " << f.member_cells.size();
        for (const auto& cell : f.member_cells)
            for (int v : cell) os << " " << v;
        os << "\n";
    }
    os << "end_block\n";
}

}  // namespace

std::string write_block_pair(const BlockPair& pair) {
    std::ostringstream os;
    const Grid& g = pair.parent.region.grid;
    os << "foldcert/block v1\n";
    os << "dim " << g.phase_dim() << "\n";
    os << "grid_box";
    for (const auto& I : g.phase_box.iv)
        os << " " << format_real(I.lo) << " " << format_real(I.hi);
    os << "\n";
    os << "grid_res";
    for (int r : g.resolution) os << " " << r;
    os << "\n";
    os << "grid_lambda_res " << g.lambda_resolution << "\n";
    os << "split " << pair.split_axis << " " << pair.split_node << " "
       << format_real(pair.split_coordinate) << "\n";
    write_block(os, "parent", pair.parent);
    write_block(os, "attractor", pair.attractor);
    write_block(os, "repeller", pair.repeller);
    return os.str();
}

BlockPair parse_block_pair(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "foldcert/block v1")
        throw MalformedInput("block file must start with 'foldcert/block v1'");

    BlockPair pair;
    Grid grid;
    int dim = 0;
    IsolatingBlock* cur = nullptr;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto toks = tokens_of(line);
        const std::string& key = toks[0];
        if (key == "dim") {
            dim = parse_int(toks.at(1), "dim");
        } else if (key == "grid_box") {
            grid.phase_box.iv.clear();
            for (size_t i = 1; i + 1 < toks.size(); i += 2)
                grid.phase_box.iv.push_back({parse_double(toks[i], "grid_box"),
                                             parse_double(toks[i + 1], "grid_box")});
        } else if (key == "grid_res") {
            grid.resolution.clear();
            for (size_t i = 1; i < toks.size(); ++i)
                grid.resolution.push_back(parse_int(toks[i], "grid_res"));
        } else if (key == "grid_lambda_res") {
            grid.lambda_resolution = parse_int(toks.at(1), "grid_lambda_res");
        } else if (key == "split") {
            pair.split_axis = parse_int(toks.at(1), "split");
            pair.split_node = parse_int(toks.at(2), "split");
            pair.split_coordinate = parse_double(toks.at(3), "split");
        } else if (key == "begin_block") {
            const std::string& name = toks.at(1);
            cur = name == "parent" ? &pair.parent
                  : name == "attractor" ? &pair.attractor
                                        : &pair.repeller;
            cur->region.grid = grid;
            cur->region.cells.clear();
            cur->faces.clear();
        } else if (key == "cell") {
            if (!cur) throw MalformedInput("cell outside block section");
            std::vector<int> cell;
            for (size_t i = 1; i < toks.size(); ++i)
                cell.push_back(parse_int(toks[i], "cell"));
            if (static_cast<int>(cell.size()) != dim)
                throw MalformedInput("cell arity mismatch");
            cur->region.cells.insert(cell);
        } else if (key == "face") {
            if (!cur) throw MalformedInput("face outside block section");
            BlockFace f;
            size_t i = 1;
            f.axis = parse_int(toks.at(i++), "face");
            f.side = parse_int(toks.at(i++), "face");
            f.node_index = parse_int(toks.at(i++), "face");
            f.coordinate = parse_double(toks.at(i++), "face");
            f.role = role_from(toks.at(i++));
            f.cert.sign = sign_from(toks.at(i++));
            f.cert.margin = parse_double(toks.at(i++), "face margin");
            f.cert.sample_count = parse_int(toks.at(i++), "face");
            f.cert.covering_radius = parse_double(toks.at(i++), "face");
            f.lambda_range.lo = parse_double(toks.at(i++), "face");
            f.lambda_range.hi = parse_double(toks.at(i++), "face");
            f.flow_through_assumed = parse_int(toks.at(i++), "face") != 0;
            size_t ncells = static_cast<size_t>(parse_int(toks.at(i++), "face"));
            for (size_t c = 0; c < ncells; ++c) {
                std::vector<int> cell;
                for (int d = 0; d < dim; ++d)
                    cell.push_back(parse_int(toks.at(i++), "face cell"));
                f.member_cells.push_back(std::move(cell));
            }
            f.cert.face = f.describe();
            cur->faces.push_back(std::move(f));
        } else if (key == "end_block") {
            cur = nullptr;
        } else {
            throw MalformedInput("unknown block key: " + key);
        }
    }
    if (pair.parent.region.empty()) throw MalformedInput("block file missing parent");
    return pair;
}

namespace {

void write_homology(std::ostream& os, const std::string& name, const HomologyResult& h) {
    os << "begin_homology " << name << "\n";
    os << "betti";
    for (int b : h.betti) os << " " << b;
    os << "\n";
    for (size_t k = 0; k < h.torsion.size(); ++k) {
        if (h.torsion[k].empty()) continue;
        os << "torsion " << k;
        for (long long t : h.torsion[k]) os << " " << t;
        os << "\n";
    }
    os << "end_homology\n";
}

HomologyResult parse_homology(std::istream& in) {
    HomologyResult h;
    std::string line;
    while (std::getline(in, line)) {
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        if (toks[0] == "betti") {
            for (size_t i = 1; i < toks.size(); ++i)
                h.betti.push_back(parse_int(toks[i], "betti"));
            h.torsion.assign(h.betti.size(), {});
        } else if (toks[0] == "torsion") {
            size_t deg = static_cast<size_t>(parse_int(toks.at(1), "torsion"));
            for (size_t i = 2; i < toks.size(); ++i)
                h.torsion.at(deg).push_back(std::stoll(toks[i]));
        } else if (toks[0] == "end_homology") {
            return h;
        } else {
            throw MalformedInput("unexpected homology line: " + line);
        }
    }
    throw MalformedInput("unterminated homology block");
}

}  // namespace

std::string write_conley_report(const ConleyIndexReport& rep) {
    std::ostringstream os;
    os << "foldcert/conley v1\n";
    os << "k " << (rep.k ? std::to_string(*rep.k) : "absent") << "\n";
    write_homology(os, "ch_S", rep.ch_S);
    write_homology(os, "ch_A", rep.ch_A);
    write_homology(os, "ch_Astar", rep.ch_Astar);
    return os.str();
}

ConleyIndexReport parse_conley_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "foldcert/conley v1")
        throw MalformedInput("conley file must start with 'foldcert/conley v1'");
    ConleyIndexReport rep;
    while (std::getline(in, line)) {
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        if (toks[0] == "k") {
            if (toks.at(1) != "absent") rep.k = parse_int(toks[1], "k");
        } else if (toks[0] == "begin_homology") {
            HomologyResult h = parse_homology(in);
            if (toks.at(1) == "ch_S") rep.ch_S = h;
            else if (toks[1] == "ch_A") rep.ch_A = h;
            else if (toks[1] == "ch_Astar") rep.ch_Astar = h;
            else throw MalformedInput("unknown homology name: " + toks[1]);
        } else {
            throw MalformedInput("unknown conley key: " + toks[0]);
        }
    }
    return rep;
}

std::string write_certificate(const Certificate& cert, const ConleyIndexReport& rep,
                              const SimpleBlockReport& simple) {
    std::ostringstream os;
    os << "foldcert/certificate v1\n";
    os << "verdict " << (cert.granted ? "Certificate" : "Rejection") << "\n";
    os << "k " << (cert.granted ? std::to_string(cert.k) : "absent") << "\n";
    if (!cert.granted) os << "reason " << cert.rejection_reason << "\n";
    os << "condition_i product_block assumed\n";
    os << "condition_ii simple_block " << (cert.simple_block_ok ? "pass" : "fail")
       << "\n";
    os << "condition_iii trivial_index " << (cert.ch_S_trivial ? "pass" : "fail")
       << "\n";
    os << "condition_iv pair_indices " << (cert.pair_indices_ok ? "pass" : "fail")
       << "\n";
    for (const auto& e : simple.entries) {
        os << "simple name=[" << e.name << "]";
        if (e.empty_set) os << " empty";
        if (e.full_boundary) os << " full_boundary";
        os << " connected=" << (e.connected ? 1 : 0) << " betti1=" << e.betti1
           << " " << (e.pass ? "pass" : "fail") << "\n";
    }
    write_homology(os, "ch_S", rep.ch_S);
    write_homology(os, "ch_A", rep.ch_A);
    write_homology(os, "ch_Astar", rep.ch_Astar);
    return os.str();
}

Certificate parse_certificate(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "foldcert/certificate v1")
        throw MalformedInput("certificate file must start with 'foldcert/certificate v1'");
    Certificate cert;
    while (std::getline(in, line)) {
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        if (toks[0] == "verdict") cert.granted = toks.at(1) == "Certificate";
        else if (toks[0] == "k" && toks.at(1) != "absent")
            cert.k = parse_int(toks[1], "k");
        else if (toks[0] == "reason") {
            cert.rejection_reason = line.substr(7);
        }
    }
    return cert;
}

std::string write_verification_report(const VerificationReport& rep) {
    std::ostringstream os;
    os << "foldcert/verification v1\n";
    os << "verdict " << (rep.pass ? "Pass" : "Fail") << "\n";
    os << "lambda0_estimate " << format_real(rep.lambda0_estimate) << "\n";
    os << "scaling_exponent " << format_real(rep.scaling_exponent) << "\n";
    os << "C1 " << (rep.c1_pass ? "pass" : "fail") << "\n";
    os << "C2 " << (rep.c2_pass ? "pass" : "fail") << "\n";
    os << "C3 " << (rep.c3_pass ? "pass" : "fail") << "\n";
    for (const auto& c : rep.census) {
        os << "census lambda=" << format_real(c.lambda) << " count=" << c.count
           << " dims=";
        for (size_t i = 0; i < c.unstable_dims.size(); ++i)
            os << (i ? "," : "") << c.unstable_dims[i];
        if (c.unstable_dims.empty()) os << "-";
        os << " hyperbolic=" << (c.hyperbolic ? 1 : 0) << " heteroclinic=";
        switch (c.heteroclinic) {
            case HeteroclinicResult::Pass: os << "pass"; break;
            case HeteroclinicResult::Fail: os << "fail"; break;
            default: os << "n/a"; break;
        }
        os << " exits=" << (c.orbits_exit ? 1 : 0) << "\n";
    }
    if (!rep.detail.empty()) os << "detail " << rep.detail << "\n";
    return os.str();
}

std::string write_branch_table(const EquilibriumBranch& branch) {
    std::ostringstream os;
    os << "lambda\tx\teigenvalues\tsigma_min\tstability\n";
    for (const auto& p : branch.points) {
        os << format_real(p.lambda) << "\t";
        for (int i = 0; i < p.x.size(); ++i) os << (i ? "," : "") << format_real(p.x[i]);
        os << "\t";
        for (size_t i = 0; i < p.eigenvalues.size(); ++i)
            os << (i ? "," : "") << format_real(p.eigenvalues[i].real()) << "+"
               << format_real(p.eigenvalues[i].imag()) << "i";
        os << "\t" << format_real(p.smallest_singular_value) << "\t";
        switch (p.stability) {
            case BranchPoint::Stability::Attracting: os << "attracting"; break;
            case BranchPoint::Stability::Saddle: os << "saddle-" << p.unstable_dim; break;
            default: os << "degenerate"; break;
        }
        os << "\n";
    }
    return os.str();
}

BlockDescription parse_block_description(const std::string& text, int dim) {
    BlockDescription bd;
    std::istringstream in(text);
    std::string line;
    bool have_box = false, have_split = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        if (toks[0] == "box=") {
            for (size_t i = 1; i + 1 < toks.size(); i += 2)
                bd.box.iv.push_back({parse_double(toks[i], "box"),
                                     parse_double(toks[i + 1], "box")});
            have_box = true;
        } else if (toks[0] == "split=") {
            bd.split_axis = parse_int(toks.at(1), "split");
            bd.split_coordinate = parse_double(toks.at(2), "split");
            have_split = true;
        } else if (toks[0] == "point=") {
            bd.interior_point = Vec(toks.size() - 1);
            for (size_t i = 1; i < toks.size(); ++i)
                bd.interior_point[i - 1] = parse_double(toks[i], "point");
        } else if (toks[0] == "resolution=") {
            for (size_t i = 1; i < toks.size(); ++i)
                bd.resolution.push_back(parse_int(toks[i], "resolution"));
        } else if (toks[0] == "lambda_resolution=") {
            bd.lambda_resolution = parse_int(toks.at(1), "lambda_resolution");
        } else {
            throw MalformedInput("unknown block description key: " + toks[0]);
        }
    }
    if (!have_box) throw MalformedInput("block description missing 'box='");
    if (!have_split) throw MalformedInput("block description missing 'split='");
    if (static_cast<int>(bd.box.iv.size()) != dim)
        throw DimensionMismatch("block box dimension does not match the samples");
    if (bd.resolution.empty()) bd.resolution.assign(dim, 16);
    for (int r : bd.resolution)
        if (r < 2) throw ConfigInvalid("resolution must be at least 2 per axis");
    if (bd.lambda_resolution < 2)
        throw ConfigInvalid("lambda resolution must be at least 2");
    if (bd.interior_point.size() == 0) {
        bd.interior_point = bd.box.center();
        bd.interior_point[bd.split_axis] = bd.split_coordinate;
    }
    return bd;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

}  // namespace foldcert
