#include "tokendrop/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "tokendrop/errors.hpp"

namespace tokendrop {

namespace {

struct Line {
    int number = 0;
    std::string directive;
    std::vector<std::string> args;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++number;
        std::istringstream iss{std::string(raw)};
        Line line;
        line.number = number;
        if (!(iss >> line.directive)) continue;       // blank
        if (line.directive[0] == '#') continue;       // comment
        std::string arg;
        while (iss >> arg) line.args.push_back(std::move(arg));
        lines.push_back(std::move(line));
    }
    return lines;
}

NodeId parse_id(const Line& line, const std::string& arg) {
    try {
        std::size_t used = 0;
        NodeId v = std::stoll(arg, &used);
        if (used != arg.size() || v < 0) throw std::invalid_argument(arg);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line.number, "expected a non-negative integer id, got '" + arg + "'");
    }
}

int parse_int(const Line& line, const std::string& arg) {
    try {
        std::size_t used = 0;
        int v = std::stoi(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line.number, "expected an integer, got '" + arg + "'");
    }
}

void expect_args(const Line& line, std::size_t count) {
    if (line.args.size() != count)
        throw ParseError(line.number, "directive '" + line.directive + "' expects " +
                                          std::to_string(count) + " argument(s)");
}

}  // namespace

std::string format_instance(const Instance& instance) {
    std::ostringstream out;
    if (const auto* g = std::get_if<UndirectedGraph>(&instance)) {
        out << "kind graph\n";
        for (NodeId v : g->nodes()) out << "node " << v << "\n";
        for (const auto& [a, b] : g->edges()) out << "edge " << a << " " << b << "\n";
    } else if (const auto* t = std::get_if<TokenDropInstance>(&instance)) {
        out << "kind tokendrop\n";
        for (NodeId v : t->nodes()) out << "node " << v << "\n";
        for (NodeId v : t->nodes()) out << "level " << v << " " << t->level(v) << "\n";
        for (NodeId v : t->tokens()) out << "token " << v << "\n";
        for (const auto& [child, parent] : t->edges()) out << "edge " << child << " " << parent << "\n";
    } else {
        const auto& a = std::get<AssignmentInstance>(instance);
        out << "kind assignment\n";
        for (NodeId s : a.servers()) out << "server " << s << "\n";
        for (const auto& c : a.customers()) {
            out << "customer " << c.id;
            for (NodeId s : c.servers) out << " " << s;
            out << "\n";
        }
    }
    return out.str();
}

Instance parse_instance(std::string_view text) {
    std::vector<Line> lines = tokenize(text);
    if (lines.empty()) throw ParseError(1, "empty instance");
    const Line& head = lines.front();
    if (head.directive != "kind" || head.args.size() != 1)
        throw ParseError(head.number, "first directive must be 'kind <graph|tokendrop|assignment>'");
    const std::string& kind = head.args[0];

    auto check_directive = [&](const Line& line, std::initializer_list<const char*> allowed) {
        for (const char* a : allowed)
            if (line.directive == a) return;
        throw ParseError(line.number, "unknown directive '" + line.directive + "' for kind " + kind);
    };

    if (kind == "graph") {
        std::vector<NodeId> nodes;
        std::vector<Edge> edges;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const Line& line = lines[i];
            check_directive(line, {"node", "edge"});
            if (line.directive == "node") {
                expect_args(line, 1);
                nodes.push_back(parse_id(line, line.args[0]));
            } else {
                expect_args(line, 2);
                edges.emplace_back(parse_id(line, line.args[0]), parse_id(line, line.args[1]));
            }
        }
        return UndirectedGraph::create(std::move(nodes), std::move(edges));
    }
    if (kind == "tokendrop") {
        std::vector<NodeId> nodes, tokens;
        std::vector<Edge> edges;
        std::vector<std::pair<NodeId, int>> levels;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const Line& line = lines[i];
            check_directive(line, {"node", "edge", "level", "token"});
            if (line.directive == "node") {
                expect_args(line, 1);
                nodes.push_back(parse_id(line, line.args[0]));
            } else if (line.directive == "level") {
                expect_args(line, 2);
                levels.emplace_back(parse_id(line, line.args[0]), parse_int(line, line.args[1]));
            } else if (line.directive == "token") {
                expect_args(line, 1);
                tokens.push_back(parse_id(line, line.args[0]));
            } else {
                expect_args(line, 2);
                edges.emplace_back(parse_id(line, line.args[0]), parse_id(line, line.args[1]));
            }
        }
        return TokenDropInstance::create(std::move(nodes), std::move(edges), std::move(levels),
                                         std::move(tokens));
    }
    if (kind == "assignment") {
        std::vector<NodeId> servers;
        std::vector<AssignmentInstance::Customer> customers;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const Line& line = lines[i];
            check_directive(line, {"server", "customer"});
            if (line.directive == "server") {
                expect_args(line, 1);
                servers.push_back(parse_id(line, line.args[0]));
            } else {
                if (line.args.size() < 2)
                    throw ParseError(line.number, "customer needs an id and at least one server");
                AssignmentInstance::Customer c;
                c.id = parse_id(line, line.args[0]);
                for (std::size_t a = 1; a < line.args.size(); ++a)
                    c.servers.push_back(parse_id(line, line.args[a]));
                customers.push_back(std::move(c));
            }
        }
        return AssignmentInstance::create(std::move(servers), std::move(customers));
    }
    throw ParseError(head.number, "unknown kind '" + kind + "'");
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << format_instance(instance);
}

Instance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str());
}

}  // namespace tokendrop
