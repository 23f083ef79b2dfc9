#pragma once

#include <cstdio>
#include <sstream>
#include <string>

namespace sciencemap::svg {

// Fixed-precision number formatting so renders are byte-stable.
inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

inline std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

class Document {
public:
    Document(double width, double height) : width_(width), height_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_)
              << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' '
              << num(height_) << "\">\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
              << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& extra = "") {
        body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
              << "\" fill=\"" << fill << "\"" << (extra.empty() ? "" : " " + extra) << "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width) {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
              << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << num(stroke_width) << "\"/>\n";
    }

    void text(double x, double y, const std::string& content, double size,
              const std::string& fill = "#333333") {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
              << "\" font-family=\"sans-serif\" fill=\"" << fill << "\">" << escape(content)
              << "</text>\n";
    }

    std::string finish() const { return body_.str() + "</svg>\n"; }

    double width() const { return width_; }
    double height() const { return height_; }

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

// Linear heat color: white -> warm red, t in [0,1].
inline std::string heat_color(double t) {
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    int r = 255;
    int g = static_cast<int>(255.0 - 195.0 * t);
    int b = static_cast<int>(255.0 - 235.0 * t);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace sciencemap::svg
