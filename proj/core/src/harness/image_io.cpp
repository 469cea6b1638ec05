// SPDX-License-Identifier: Apache-2.0
#include "tscc/harness/image_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace tscc::harness {

namespace {

std::optional<std::vector<uint8_t>> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>());
}

ImageTensor from_rgb8(int channels, int h, int w, const std::vector<uint8_t>& rgb,
                      int src_channels) {
    std::vector<double> data(static_cast<size_t>(channels) * h * w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t src = (static_cast<size_t>(y) * w + x) * src_channels;
            for (int c = 0; c < channels; ++c) {
                const int sc = src_channels == 1 ? 0 : std::min(c, src_channels - 1);
                data[(static_cast<size_t>(c) * h + y) * w + x] = rgb[src + sc] / 255.0;
            }
        }
    }
    return ImageTensor(channels, h, w, std::move(data));
}

uint32_t be32(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | p[3];
}

void put_be32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

std::optional<ImageTensor> load_ppm(const std::string& path) {
    auto data = read_file(path);
    if (!data || data->size() < 10) return std::nullopt;
    // header: "P6" whitespace width height maxval, single whitespace, raster
    size_t pos = 0;
    auto token = [&]() -> std::string {
        std::string t;
        while (pos < data->size()) {
            char c = static_cast<char>((*data)[pos]);
            if (c == '#') {  // comment to end of line
                while (pos < data->size() && (*data)[pos] != '\n') ++pos;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!t.empty()) break;
                ++pos;
                continue;
            }
            t.push_back(c);
            ++pos;
        }
        return t;
    };
    if (token() != "P6") return std::nullopt;
    const std::string ws = token(), hs = token(), ms = token();
    if (ws.empty() || hs.empty() || ms.empty()) return std::nullopt;
    const int w = std::atoi(ws.c_str());
    const int h = std::atoi(hs.c_str());
    const int maxval = std::atoi(ms.c_str());
    if (w <= 0 || h <= 0 || maxval != 255) return std::nullopt;
    ++pos;  // single whitespace after maxval
    const size_t need = static_cast<size_t>(w) * h * 3;
    if (data->size() < pos + need) return std::nullopt;
    std::vector<uint8_t> rgb(data->begin() + pos, data->begin() + pos + need);
    return from_rgb8(3, h, w, rgb, 3);
}

void save_ppm(const ImageTensor& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_ppm: cannot write " + path);
    out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                const int cc = std::min(c, image.channels() - 1);
                const int v =
                    static_cast<int>(std::lround(image.at(cc, y, x) * 255.0));
                out.put(static_cast<char>(std::clamp(v, 0, 255)));
            }
        }
    }
}

std::optional<ImageTensor> load_png(const std::string& path) {
    auto data = read_file(path);
    if (!data || data->size() < 45) return std::nullopt;
    static const uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (std::memcmp(data->data(), sig, 8) != 0) return std::nullopt;

    uint32_t w = 0, h = 0;
    int bit_depth = 0, color_type = -1, interlace = 0;
    std::vector<uint8_t> idat;
    std::vector<uint8_t> palette;

    size_t pos = 8;
    while (pos + 8 <= data->size()) {
        const uint32_t len = be32(data->data() + pos);
        if (pos + 12 + len > data->size()) return std::nullopt;
        const char* type = reinterpret_cast<const char*>(data->data() + pos + 4);
        const uint8_t* body = data->data() + pos + 8;
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) return std::nullopt;
            w = be32(body);
            h = be32(body + 4);
            bit_depth = body[8];
            color_type = body[9];
            interlace = body[12];
        } else if (std::memcmp(type, "PLTE", 4) == 0) {
            palette.assign(body, body + len);
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), body, body + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (w == 0 || h == 0 || bit_depth != 8 || interlace != 0) return std::nullopt;

    int src_channels;
    switch (color_type) {
        case 0: src_channels = 1; break;  // gray
        case 2: src_channels = 3; break;  // rgb
        case 3: src_channels = 1; break;  // palette indices
        case 6: src_channels = 4; break;  // rgba
        default: return std::nullopt;
    }
    if (color_type == 3 && palette.empty()) return std::nullopt;

    const size_t stride = static_cast<size_t>(w) * src_channels;
    const size_t raw_size = (stride + 1) * h;
    std::vector<uint8_t> raw(raw_size);
    uLongf out_len = raw_size;
    if (uncompress(raw.data(), &out_len, idat.data(), idat.size()) != Z_OK ||
        out_len != raw_size) {
        return std::nullopt;
    }

    // undo per-row filters
    std::vector<uint8_t> pixels(stride * h);
    const int bpp = src_channels;
    for (uint32_t y = 0; y < h; ++y) {
        const uint8_t filter = raw[y * (stride + 1)];
        const uint8_t* src = raw.data() + y * (stride + 1) + 1;
        uint8_t* cur = pixels.data() + y * stride;
        const uint8_t* up = y > 0 ? pixels.data() + (y - 1) * stride : nullptr;
        for (size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<size_t>(bpp) ? cur[i - bpp] : 0;
            const int b = up ? up[i] : 0;
            const int c = (up && i >= static_cast<size_t>(bpp)) ? up[i - bpp] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: return std::nullopt;
            }
            cur[i] = static_cast<uint8_t>(v);
        }
    }

    if (color_type == 3) {
        std::vector<uint8_t> rgb(static_cast<size_t>(w) * h * 3);
        for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
            const size_t pi = pixels[i] * 3;
            if (pi + 2 >= palette.size()) return std::nullopt;
            rgb[3 * i] = palette[pi];
            rgb[3 * i + 1] = palette[pi + 1];
            rgb[3 * i + 2] = palette[pi + 2];
        }
        return from_rgb8(3, static_cast<int>(h), static_cast<int>(w), rgb, 3);
    }
    return from_rgb8(3, static_cast<int>(h), static_cast<int>(w), pixels, src_channels);
}

void save_png(const ImageTensor& image, const std::string& path) {
    const int w = image.width(), h = image.height();
    const size_t stride = static_cast<size_t>(w) * 3;
    std::vector<uint8_t> raw((stride + 1) * h);
    for (int y = 0; y < h; ++y) {
        raw[y * (stride + 1)] = 0;  // filter: none
        uint8_t* row = raw.data() + y * (stride + 1) + 1;
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const int cc = std::min(c, image.channels() - 1);
                const int v = static_cast<int>(std::lround(image.at(cc, y, x) * 255.0));
                row[x * 3 + c] = static_cast<uint8_t>(std::clamp(v, 0, 255));
            }
        }
    }
    uLongf bound = compressBound(raw.size());
    std::vector<uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), raw.size(), 6) != Z_OK) {
        throw std::runtime_error("save_png: deflate failed");
    }
    compressed.resize(bound);

    std::vector<uint8_t> out;
    static const uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.insert(out.end(), sig, sig + 8);

    auto chunk = [&out](const char* type, const std::vector<uint8_t>& body) {
        put_be32(out, static_cast<uint32_t>(body.size()));
        const size_t start = out.size();
        out.insert(out.end(), type, type + 4);
        out.insert(out.end(), body.begin(), body.end());
        const uint32_t crc = static_cast<uint32_t>(
            crc32(0, out.data() + start, static_cast<uInt>(out.size() - start)));
        put_be32(out, crc);
    };

    std::vector<uint8_t> ihdr;
    put_be32(ihdr, static_cast<uint32_t>(w));
    put_be32(ihdr, static_cast<uint32_t>(h));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: RGB
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    chunk("IHDR", ihdr);
    chunk("IDAT", compressed);
    chunk("IEND", {});

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_png: cannot write " + path);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
}

ImageTensor resize_image(const ImageTensor& image, int target_height, int target_width) {
    const int h = image.height(), w = image.width(), ch = image.channels();
    // center-crop to the target aspect
    const double target_aspect = static_cast<double>(target_width) / target_height;
    const double aspect = static_cast<double>(w) / h;
    int crop_w = w, crop_h = h, x0 = 0, y0 = 0;
    if (aspect > target_aspect) {
        crop_w = std::max(1, static_cast<int>(std::lround(h * target_aspect)));
        x0 = (w - crop_w) / 2;
    } else if (aspect < target_aspect) {
        crop_h = std::max(1, static_cast<int>(std::lround(w / target_aspect)));
        y0 = (h - crop_h) / 2;
    }

    ImageTensor out(ch, target_height, target_width);
    for (int c = 0; c < ch; ++c) {
        for (int y = 0; y < target_height; ++y) {
            const double sy = (y + 0.5) * crop_h / target_height - 0.5 + y0;
            const int iy = std::clamp(static_cast<int>(std::floor(sy)), 0, h - 1);
            const int iy1 = std::min(iy + 1, h - 1);
            const double fy = std::clamp(sy - iy, 0.0, 1.0);
            for (int x = 0; x < target_width; ++x) {
                const double sx = (x + 0.5) * crop_w / target_width - 0.5 + x0;
                const int ix = std::clamp(static_cast<int>(std::floor(sx)), 0, w - 1);
                const int ix1 = std::min(ix + 1, w - 1);
                const double fx = std::clamp(sx - ix, 0.0, 1.0);
                const double v =
                    (1 - fy) * ((1 - fx) * image.at(c, iy, ix) + fx * image.at(c, iy, ix1)) +
                    fy * ((1 - fx) * image.at(c, iy1, ix) + fx * image.at(c, iy1, ix1));
                out.at(c, y, x) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

LoadReport load_image_dir(const std::string& dir, int target_height, int target_width) {
    namespace fs = std::filesystem;
    LoadReport report;
    std::vector<std::string> files;
    if (fs::is_directory(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string ext = entry.path().extension().string();
            if (ext == ".png" || ext == ".ppm" || ext == ".PNG" || ext == ".PPM") {
                files.push_back(entry.path().string());
            }
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::optional<ImageTensor> img;
        if (file.size() > 4 && (file.substr(file.size() - 4) == ".ppm" ||
                                file.substr(file.size() - 4) == ".PPM")) {
            img = load_ppm(file);
        } else {
            img = load_png(file);
        }
        if (!img) {
            ++report.skipped;
            continue;
        }
        report.images.push_back(resize_image(*img, target_height, target_width));
    }
    return report;
}

} // namespace tscc::harness
