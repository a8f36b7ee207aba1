#include "fdg/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fdg {

namespace {

struct Token {
    std::string text;
    int column;
};

struct Line {
    int number;
    std::vector<Token> tokens;
};

std::vector<Line> tokenize(const std::string& text)
{
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.resize(hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i])))
                ++i;
            const std::size_t start = i;
            while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])))
                ++i;
            if (i > start)
                line.tokens.push_back({raw.substr(start, i - start), static_cast<int>(start) + 1});
        }
        if (!line.tokens.empty())
            out.push_back(std::move(line));
    }
    return out;
}

class Cursor {
public:
    explicit Cursor(const std::string& text) : lines_(tokenize(text))
    {
        // Count newlines so errors on truncated input point past the last line.
        end_line_ = 1;
        for (char c : text)
            end_line_ += c == '\n';
    }

    bool done() const { return pos_ >= lines_.size(); }
    const Line& peek() const { return lines_[pos_]; }

    const Line& next(const char* what)
    {
        if (done())
            throw ParseError(end_line_, 1, std::string("unexpected end of input, expected ") + what);
        return lines_[pos_++];
    }

    [[noreturn]] void fail(const Line& l, const Token& t, const std::string& what) const
    {
        throw ParseError(l.number, t.column, what);
    }

    [[noreturn]] void fail_end(const Line& l, const std::string& what) const
    {
        const int col = l.tokens.empty() ? 1 : l.tokens.back().column + static_cast<int>(l.tokens.back().text.size());
        throw ParseError(l.number, col, what);
    }

private:
    std::vector<Line> lines_;
    std::size_t pos_ = 0;
    int end_line_ = 1;
};

template <class T>
T parse_number(const Cursor& c, const Line& l, const Token& t)
{
    T v{};
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        c.fail(l, t, "bad number '" + t.text + "'");
    return v;
}

void expect_count(const Cursor& c, const Line& l, std::size_t count, const char* what)
{
    if (l.tokens.size() < count)
        c.fail_end(l, std::string("too few entries in ") + what);
    if (l.tokens.size() > count)
        c.fail(l, l.tokens[count], std::string("too many entries in ") + what);
}

std::string format_double(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::string format_tuple(const AttrTuple& t)
{
    std::string s;
    for (std::size_t k = 0; k < t.values.size(); ++k) {
        if (k)
            s += ',';
        s += format_double(t.values[k]);
    }
    return s;
}

AttrTuple parse_tuple(const Cursor& c, const Line& l, const Token& t)
{
    std::vector<double> values;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = t.text.find(',', start);
        const std::string part = t.text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        values.push_back(parse_number<double>(c, l, {part, t.column + static_cast<int>(start)}));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return AttrTuple::of(std::move(values));
}

void write_order(std::ostringstream& out, const ArcOrder& order)
{
    out << "ordered\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
        out << "order " << i << ':';
        for (int j : order[i])
            out << ' ' << j;
        out << '\n';
    }
}

// Reads the "ordered" marker, then "order i: j k ..." for every vertex in sequence.
ArcOrder parse_order(Cursor& c, int n)
{
    const Line& marker = c.next("'ordered'");
    if (marker.tokens[0].text != "ordered" || marker.tokens.size() != 1)
        c.fail(marker, marker.tokens[0], "expected 'ordered'");
    ArcOrder order(n);
    for (int i = 0; i < n; ++i) {
        const Line& l = c.next("an order line");
        if (l.tokens[0].text != "order" || l.tokens.size() < 2)
            c.fail(l, l.tokens[0], "expected 'order " + std::to_string(i) + ":'");
        const Token& head = l.tokens[1];
        if (head.text != std::to_string(i) + ":")
            c.fail(l, head, "expected '" + std::to_string(i) + ":'");
        for (std::size_t k = 2; k < l.tokens.size(); ++k)
            order[i].push_back(parse_number<int>(c, l, l.tokens[k]));
    }
    return order;
}

template <class T, class F>
T validated(const Cursor& c, const Line& last, T value, F&& check)
{
    try {
        check(value);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        c.fail_end(last, e.what());
    }
    return value;
}

} // namespace

AttributedGraph parse_ag(const std::string& text)
{
    Cursor c(text);
    const Line& head = c.next("the vertex count");
    expect_count(c, head, 1, "the vertex count line");
    const int n = parse_number<int>(c, head, head.tokens[0]);
    if (n < 0)
        c.fail(head, head.tokens[0], "negative vertex count");
    AttributedGraph g;
    const Line* last = &head;
    bool saw_null = false;
    if (n > 0) {
        const Line& vl = c.next("vertex attributes");
        expect_count(c, vl, n, "the vertex line");
        for (const Token& t : vl.tokens) {
            if (t.text == "-") {
                g.vertices.push_back(AttrTuple::null());
                saw_null = true;
            } else {
                g.vertices.push_back(parse_tuple(c, vl, t));
            }
        }
        for (int i = 0; i < n; ++i) {
            const Line& row = c.next("an arc row");
            expect_count(c, row, n, "an arc row");
            for (int j = 0; j < n; ++j) {
                const Token& t = row.tokens[j];
                if (t.text == "-")
                    continue;
                if (i == j)
                    c.fail(row, t, "self-loops are not allowed");
                if (t.text == "~") {
                    g.add_arc(i, j, AttrTuple::null());
                    saw_null = true;
                } else {
                    g.add_arc(i, j, parse_tuple(c, row, t));
                }
            }
            last = &row;
        }
    }
    bool extended_line = false;
    while (!c.done()) {
        const Line& l = c.peek();
        if (l.tokens[0].text == "extended" && l.tokens.size() == 1 && !extended_line && !g.arc_order) {
            extended_line = true;
            c.next("");
            last = &l;
        } else if (l.tokens[0].text == "ordered" && !g.arc_order) {
            g.arc_order = parse_order(c, n);
            last = &l;
        } else {
            c.fail(l, l.tokens[0], "unexpected '" + l.tokens[0].text + "'");
        }
    }
    g.extended = extended_line;
    if (saw_null && !g.extended)
        c.fail_end(*last, "null elements require the 'extended' line");
    return validated(c, *last, std::move(g), [](const AttributedGraph& v) { v.validate(); });
}

std::string format_ag(const AttributedGraph& g)
{
    std::ostringstream out;
    const int n = g.order();
    out << n << '\n';
    if (n > 0) {
        for (int i = 0; i < n; ++i)
            out << (i ? " " : "") << (g.vertices[i].is_null ? "-" : format_tuple(g.vertices[i]));
        out << '\n';
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                auto it = g.arcs.find({i, j});
                out << (j ? " " : "") << (it == g.arcs.end() ? "-" : it->second.is_null ? "~" : format_tuple(it->second));
            }
            out << '\n';
        }
    }
    if (g.extended)
        out << "extended\n";
    if (g.arc_order)
        write_order(out, *g.arc_order);
    return out.str();
}

namespace {

void write_pdf(std::ostringstream& out, const char* key, int index, const Pdf& p)
{
    out << key << ' ' << index << ' ' << format_double(p.support()) << ' ' << format_double(p.null_mass()) << ' '
        << p.arity();
    for (const auto& comp : p.components()) {
        out << " |";
        for (auto [b, m] : comp)
            out << ' ' << b << ':' << format_double(m);
    }
    out << '\n';
}

Pdf parse_pdf(Cursor& c, const char* key, int index)
{
    const Line& l = c.next(key);
    if (l.tokens.size() < 5)
        c.fail_end(l, std::string("incomplete ") + key + " line");
    if (l.tokens[0].text != key)
        c.fail(l, l.tokens[0], std::string("expected '") + key + "'");
    if (parse_number<int>(c, l, l.tokens[1]) != index)
        c.fail(l, l.tokens[1], "expected index " + std::to_string(index));
    const double support = parse_number<double>(c, l, l.tokens[2]);
    const double null_mass = parse_number<double>(c, l, l.tokens[3]);
    const int arity = parse_number<int>(c, l, l.tokens[4]);
    if (arity < 0)
        c.fail(l, l.tokens[4], "negative arity");
    std::vector<std::map<long, double>> comps;
    std::size_t k = 5;
    for (int a = 0; a < arity; ++a) {
        if (k >= l.tokens.size() || l.tokens[k].text != "|")
            k >= l.tokens.size() ? c.fail_end(l, "missing component") : c.fail(l, l.tokens[k], "expected '|'");
        ++k;
        auto& comp = comps.emplace_back();
        for (; k < l.tokens.size() && l.tokens[k].text != "|"; ++k) {
            const Token& t = l.tokens[k];
            const auto colon = t.text.find(':');
            if (colon == std::string::npos)
                c.fail(l, t, "expected bin:mass");
            const long b = parse_number<long>(c, l, {t.text.substr(0, colon), t.column});
            const double m = parse_number<double>(c, l, {t.text.substr(colon + 1), t.column + static_cast<int>(colon) + 1});
            if (!comp.emplace(b, m).second)
                c.fail(l, t, "repeated bin");
        }
    }
    if (k < l.tokens.size())
        c.fail(l, l.tokens[k], "more components than the arity");
    try {
        return Pdf::from_masses(support, null_mass, std::move(comps));
    } catch (const Error& e) {
        c.fail(l, l.tokens[2], e.what());
    }
}

Binning parse_binning(Cursor& c, const char* key)
{
    const Line& l = c.next(key);
    if (l.tokens[0].text != key)
        c.fail(l, l.tokens[0], std::string("expected '") + key + "'");
    Binning b;
    for (std::size_t k = 1; k < l.tokens.size(); ++k) {
        const double w = parse_number<double>(c, l, l.tokens[k]);
        if (!(w > 0.0))
            c.fail(l, l.tokens[k], "bin widths must be positive");
        b.widths.push_back(w);
    }
    return b;
}

const char* const kRelationNames[] = {"a_v", "o_v", "e_v", "a_e", "o_e", "e_e"};

BoolMatrix* relation_slot(Relations& r, int k)
{
    BoolMatrix* slots[] = {&r.a_v, &r.o_v, &r.e_v, &r.a_e, &r.o_e, &r.e_e};
    return slots[k];
}

} // namespace

std::string format_fdg(const Fdg& f)
{
    std::ostringstream out;
    out << "fdg " << f.n << ' ' << format_double(f.z) << '\n';
    for (const auto* key : {"vertex_binning", "arc_binning"}) {
        out << key;
        for (double w : (key[0] == 'v' ? f.vertex_binning : f.arc_binning).widths)
            out << ' ' << format_double(w);
        out << '\n';
    }
    for (int i = 0; i < f.n; ++i)
        write_pdf(out, "vertex", i, f.vertex_pdfs[i]);
    for (int s = 0; s < f.arc_count(); ++s)
        write_pdf(out, "arc", s, f.arc_pdfs[s]);
    Relations rel = f.rel;
    for (int k = 0; k < 6; ++k) {
        const BoolMatrix& m = *relation_slot(rel, k);
        out << kRelationNames[k] << ' ' << m.size();
        for (int i = 0; i < m.size(); ++i) {
            out << ' ';
            for (int j = 0; j < m.size(); ++j)
                out << (m(i, j) ? '1' : '0');
        }
        out << '\n';
    }
    if (f.arc_order)
        write_order(out, *f.arc_order);
    out << "end\n";
    return out.str();
}

Fdg parse_fdg(const std::string& text)
{
    Cursor c(text);
    const Line& head = c.next("the fdg header");
    if (head.tokens[0].text != "fdg")
        c.fail(head, head.tokens[0], "expected 'fdg'");
    expect_count(c, head, 3, "the fdg header");
    Fdg f;
    f.n = parse_number<int>(c, head, head.tokens[1]);
    if (f.n < 0)
        c.fail(head, head.tokens[1], "negative order");
    f.z = parse_number<double>(c, head, head.tokens[2]);
    f.vertex_binning = parse_binning(c, "vertex_binning");
    f.arc_binning = parse_binning(c, "arc_binning");
    for (int i = 0; i < f.n; ++i)
        f.vertex_pdfs.push_back(parse_pdf(c, "vertex", i));
    for (int s = 0; s < f.arc_count(); ++s)
        f.arc_pdfs.push_back(parse_pdf(c, "arc", s));
    for (int k = 0; k < 6; ++k) {
        const Line& l = c.next(kRelationNames[k]);
        if (l.tokens[0].text != kRelationNames[k])
            c.fail(l, l.tokens[0], std::string("expected '") + kRelationNames[k] + "'");
        if (l.tokens.size() < 2)
            c.fail_end(l, "missing relation size");
        const int size = parse_number<int>(c, l, l.tokens[1]);
        if (size < 0)
            c.fail(l, l.tokens[1], "negative relation size");
        expect_count(c, l, 2 + static_cast<std::size_t>(size), "a relation line");
        BoolMatrix m(size);
        for (int i = 0; i < size; ++i) {
            const Token& t = l.tokens[2 + i];
            if (static_cast<int>(t.text.size()) != size)
                c.fail(l, t, "relation row of the wrong length");
            for (int j = 0; j < size; ++j) {
                if (t.text[j] != '0' && t.text[j] != '1')
                    c.fail(l, {t.text, t.column + j}, "relation entries are 0 or 1");
                m.set(i, j, t.text[j] == '1');
            }
        }
        *relation_slot(f.rel, k) = std::move(m);
    }
    if (!c.done() && c.peek().tokens[0].text == "ordered")
        f.arc_order = parse_order(c, f.n);
    const Line& end = c.next("'end'");
    if (end.tokens[0].text != "end" || end.tokens.size() != 1)
        c.fail(end, end.tokens[0], "expected 'end'");
    if (!c.done())
        c.fail(c.peek(), c.peek().tokens[0], "content after 'end'");
    return validated(c, end, std::move(f), [](const Fdg& v) { v.validate(); });
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::invalid_input, "cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush())
        throw Error(ErrorKind::invalid_input, "cannot write '" + path + "'");
}

AttributedGraph read_ag(const std::string& path) { return parse_ag(read_text_file(path)); }
void write_ag(const std::string& path, const AttributedGraph& g) { write_text_file(path, format_ag(g)); }
Fdg read_fdg(const std::string& path) { return parse_fdg(read_text_file(path)); }
void write_fdg(const std::string& path, const Fdg& f) { write_text_file(path, format_fdg(f)); }

} // namespace fdg
