/**
 * Copyright 2026, the coalmap authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "coalmap/geotiff.hpp"

#include <tiffio.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <mutex>
#include <vector>

#include "coalmap/errors.hpp"

namespace coalmap::geotiff {

namespace {

// GeoTIFF and GDAL private tags; libtiff knows nothing about them until
// they are merged in through the tag extender.
constexpr ttag_t kTagModelPixelScale = 33550;
constexpr ttag_t kTagModelTiepoint = 33922;
constexpr ttag_t kTagModelTransformation = 34264;
constexpr ttag_t kTagGeoKeyDirectory = 34735;
constexpr ttag_t kTagGeoDoubleParams = 34736;
constexpr ttag_t kTagGeoAsciiParams = 34737;
constexpr ttag_t kTagGdalNodata = 42113;

// GeoKey ids used for the CRS.
constexpr std::uint16_t kKeyModelType = 1024;
constexpr std::uint16_t kKeyRasterType = 1025;
constexpr std::uint16_t kKeyCitation = 1026;
constexpr std::uint16_t kKeyGeographicType = 2048;
constexpr std::uint16_t kKeyProjectedCSType = 3072;

const TIFFFieldInfo kGeoFieldInfo[] = {
    {kTagModelPixelScale, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelPixelScaleTag")},
    {kTagModelTiepoint, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelTiepointTag")},
    {kTagModelTransformation, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelTransformationTag")},
    {kTagGeoKeyDirectory, -1, -1, TIFF_SHORT, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("GeoKeyDirectoryTag")},
    {kTagGeoDoubleParams, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("GeoDoubleParamsTag")},
    {kTagGeoAsciiParams, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0,
     const_cast<char*>("GeoASCIIParamsTag")},
    {kTagGdalNodata, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0,
     const_cast<char*>("GDALNoDataValue")},
};

TIFFExtendProc g_parent_extender = nullptr;

void merge_geo_tags(TIFF* tif) {
    TIFFMergeFieldInfo(tif, kGeoFieldInfo,
                       sizeof(kGeoFieldInfo) / sizeof(kGeoFieldInfo[0]));
    if (g_parent_extender) g_parent_extender(tif);
}

void ensure_tags_registered() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        g_parent_extender = TIFFSetTagExtender(merge_geo_tags);
        TIFFSetWarningHandler(nullptr);
    });
}

struct TiffCloser {
    void operator()(TIFF* t) const {
        if (t) TIFFClose(t);
    }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

TiffPtr open_tiff(const std::string& path, const char* mode) {
    ensure_tags_registered();
    TiffPtr tif(TIFFOpen(path.c_str(), mode));
    if (!tif) {
        throw IoError(std::string(mode[0] == 'r' ? "cannot open raster file: "
                                                 : "cannot create raster file: ") +
                      path);
    }
    return tif;
}

SampleType decode_sample_type(std::uint16_t bits, std::uint16_t format,
                              const std::string& path) {
    switch (format) {
        case SAMPLEFORMAT_UINT:
            if (bits == 8) return SampleType::UInt8;
            if (bits == 16) return SampleType::UInt16;
            if (bits == 32) return SampleType::UInt32;
            break;
        case SAMPLEFORMAT_INT:
            if (bits == 16) return SampleType::Int16;
            if (bits == 32) return SampleType::Int32;
            break;
        case SAMPLEFORMAT_IEEEFP:
            if (bits == 32) return SampleType::Float32;
            break;
        default:
            break;
    }
    throw IoError("unsupported sample layout (" + std::to_string(bits) + " bits, format " +
                  std::to_string(format) + ") in " + path);
}

float sample_to_float(const std::uint8_t* buf, size_t index, SampleType type) {
    switch (type) {
        case SampleType::UInt8:
            return static_cast<float>(buf[index]);
        case SampleType::UInt16: {
            std::uint16_t v;
            std::memcpy(&v, buf + index * 2, 2);
            return static_cast<float>(v);
        }
        case SampleType::Int16: {
            std::int16_t v;
            std::memcpy(&v, buf + index * 2, 2);
            return static_cast<float>(v);
        }
        case SampleType::UInt32: {
            std::uint32_t v;
            std::memcpy(&v, buf + index * 4, 4);
            return static_cast<float>(v);
        }
        case SampleType::Int32: {
            std::int32_t v;
            std::memcpy(&v, buf + index * 4, 4);
            return static_cast<float>(v);
        }
        case SampleType::Float32: {
            float v;
            std::memcpy(&v, buf + index * 4, 4);
            return v;
        }
    }
    return 0.0f;
}

GeoInfo read_geo_info(TIFF* tif) {
    GeoInfo geo;

    std::uint16_t count = 0;
    double* dbl = nullptr;
    if (TIFFGetField(tif, kTagModelTransformation, &count, &dbl) && count >= 16) {
        // 4x4 row-major matrix; rows 0 and 1 carry the 2-D affine.
        geo.transform = GeoTransform{dbl[3], dbl[0], dbl[1], dbl[7], dbl[4], dbl[5]};
    } else {
        double sx = 0, sy = 0;
        bool have_scale = false;
        if (TIFFGetField(tif, kTagModelPixelScale, &count, &dbl) && count >= 2) {
            sx = dbl[0];
            sy = dbl[1];
            have_scale = true;
        }
        if (have_scale && TIFFGetField(tif, kTagModelTiepoint, &count, &dbl) && count >= 6) {
            const double i = dbl[0], j = dbl[1], x = dbl[3], y = dbl[4];
            geo.transform = GeoTransform{x - i * sx, sx, 0.0, y + j * sy, 0.0, -sy};
        }
    }

    std::uint16_t key_count = 0;
    std::uint16_t* keys = nullptr;
    if (TIFFGetField(tif, kTagGeoKeyDirectory, &key_count, &keys) && key_count >= 4) {
        const std::uint16_t num_keys = keys[3];
        char* ascii = nullptr;
        TIFFGetField(tif, kTagGeoAsciiParams, &ascii);
        int epsg = 0;
        std::string citation;
        for (std::uint16_t k = 1; k <= num_keys && (k * 4 + 3) < key_count; ++k) {
            const std::uint16_t* entry = keys + 4 * k;
            const std::uint16_t id = entry[0], location = entry[1], cnt = entry[2],
                                value = entry[3];
            if ((id == kKeyProjectedCSType || id == kKeyGeographicType) && location == 0) {
                epsg = value;
            } else if (id == kKeyCitation && location == kTagGeoAsciiParams && ascii) {
                citation.assign(ascii + value, cnt);
                while (!citation.empty() && (citation.back() == '|' || citation.back() == '\0'))
                    citation.pop_back();
            }
        }
        if (epsg > 0) {
            geo.crs = "EPSG:" + std::to_string(epsg);
        } else if (!citation.empty()) {
            geo.crs = citation;
        }
    }

    char* nodata = nullptr;
    if (TIFFGetField(tif, kTagGdalNodata, &nodata) && nodata) {
        geo.nodata_text = std::string(nodata);
    }
    return geo;
}

void write_geo_info(TIFF* tif, const GeoInfo& geo) {
    if (geo.transform) {
        const GeoTransform& gt = *geo.transform;
        if (gt[2] == 0.0 && gt[4] == 0.0 && gt[5] < 0.0) {
            const double scale[3] = {gt[1], -gt[5], 0.0};
            const double tiepoint[6] = {0.0, 0.0, 0.0, gt[0], gt[3], 0.0};
            TIFFSetField(tif, kTagModelPixelScale, static_cast<std::uint16_t>(3), scale);
            TIFFSetField(tif, kTagModelTiepoint, static_cast<std::uint16_t>(6), tiepoint);
        } else {
            const double m[16] = {gt[1], gt[2], 0, gt[0],
                                  gt[4], gt[5], 0, gt[3],
                                  0,     0,     0, 0,
                                  0,     0,     0, 1};
            TIFFSetField(tif, kTagModelTransformation, static_cast<std::uint16_t>(16), m);
        }
    }

    if (geo.crs) {
        int epsg = 0;
        const std::string& crs = *geo.crs;
        if (crs.size() > 5) {
            std::string prefix = crs.substr(0, 5);
            std::transform(prefix.begin(), prefix.end(), prefix.begin(),
                           [](unsigned char c) { return std::toupper(c); });
            if (prefix == "EPSG:") {
                epsg = std::atoi(crs.c_str() + 5);
            }
        }
        if (epsg > 0) {
            const bool geographic = epsg >= 4000 && epsg < 5000;
            const std::uint16_t keys[] = {
                1, 1, 0, 3,
                kKeyModelType, 0, 1, static_cast<std::uint16_t>(geographic ? 2 : 1),
                kKeyRasterType, 0, 1, 1,  // PixelIsArea
                geographic ? kKeyGeographicType : kKeyProjectedCSType, 0, 1,
                static_cast<std::uint16_t>(epsg),
            };
            TIFFSetField(tif, kTagGeoKeyDirectory, static_cast<std::uint16_t>(16), keys);
        } else {
            const std::string ascii = crs + "|";
            const std::uint16_t keys[] = {
                1, 1, 0, 2,
                kKeyRasterType, 0, 1, 1,
                kKeyCitation, kTagGeoAsciiParams, static_cast<std::uint16_t>(crs.size()), 0,
            };
            TIFFSetField(tif, kTagGeoKeyDirectory, static_cast<std::uint16_t>(12), keys);
            TIFFSetField(tif, kTagGeoAsciiParams, ascii.c_str());
        }
    }

    if (geo.nodata_text) {
        TIFFSetField(tif, kTagGdalNodata, geo.nodata_text->c_str());
    }
}

void setup_writer(TIFF* tif, Eigen::Index height, Eigen::Index width, int samples,
                  int bits, int sample_format, const GeoInfo& geo) {
    TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(width));
    TIFFSetField(tif, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(height));
    TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(samples));
    TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(bits));
    TIFFSetField(tif, TIFFTAG_SAMPLEFORMAT, static_cast<std::uint16_t>(sample_format));
    TIFFSetField(tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(tif, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
    TIFFSetField(tif, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(tif, 0));
    if (samples > 1) {
        std::vector<std::uint16_t> extras(static_cast<size_t>(samples - 1),
                                          EXTRASAMPLE_UNSPECIFIED);
        TIFFSetField(tif, TIFFTAG_EXTRASAMPLES, static_cast<std::uint16_t>(extras.size()),
                     extras.data());
    }
    write_geo_info(tif, geo);
}

}  // namespace

FileInfo probe(const std::string& path) {
    TiffPtr tif = open_tiff(path, "r");
    FileInfo info;
    std::uint32_t w = 0, h = 0;
    std::uint16_t spp = 1, bps = 1, sf = SAMPLEFORMAT_UINT;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &sf);
    info.width = w;
    info.height = h;
    info.samples = spp;
    info.type = decode_sample_type(bps, sf, path);
    return info;
}

Image read(const std::string& path) {
    TiffPtr tif = open_tiff(path, "r");

    std::uint32_t w = 0, h = 0;
    std::uint16_t spp = 1, bps = 1, sf = SAMPLEFORMAT_UINT, planar = PLANARCONFIG_CONTIG;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &sf);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
    if (w == 0 || h == 0) throw IoError("raster has empty dimensions: " + path);
    if (spp == 0 || spp > 512) throw IoError("unsupported sample count in " + path);

    Image img;
    img.width = static_cast<Eigen::Index>(w);
    img.height = static_cast<Eigen::Index>(h);
    img.source_type = decode_sample_type(bps, sf, path);
    img.bands.assign(spp, GridF(img.height, img.width));
    img.geo = read_geo_info(tif.get());

    if (TIFFIsTiled(tif.get())) {
        std::uint32_t tw = 0, th = 0;
        TIFFGetField(tif.get(), TIFFTAG_TILEWIDTH, &tw);
        TIFFGetField(tif.get(), TIFFTAG_TILELENGTH, &th);
        std::vector<std::uint8_t> buf(static_cast<size_t>(TIFFTileSize(tif.get())));
        const int planes = planar == PLANARCONFIG_SEPARATE ? spp : 1;
        const int samples_in_tile = planar == PLANARCONFIG_SEPARATE ? 1 : spp;
        for (int plane = 0; plane < planes; ++plane) {
            for (std::uint32_t y0 = 0; y0 < h; y0 += th) {
                for (std::uint32_t x0 = 0; x0 < w; x0 += tw) {
                    if (TIFFReadTile(tif.get(), buf.data(), x0, y0, 0,
                                     static_cast<std::uint16_t>(plane)) < 0) {
                        throw IoError("tile read failed in " + path);
                    }
                    for (std::uint32_t dy = 0; dy < th && y0 + dy < h; ++dy) {
                        for (std::uint32_t dx = 0; dx < tw && x0 + dx < w; ++dx) {
                            const size_t base =
                                (static_cast<size_t>(dy) * tw + dx) * samples_in_tile;
                            for (int s = 0; s < samples_in_tile; ++s) {
                                const int band = planar == PLANARCONFIG_SEPARATE ? plane : s;
                                img.bands[static_cast<size_t>(band)](y0 + dy, x0 + dx) =
                                    sample_to_float(buf.data(), base + s, img.source_type);
                            }
                        }
                    }
                }
            }
        }
    } else {
        std::vector<std::uint8_t> buf(static_cast<size_t>(TIFFScanlineSize(tif.get())));
        if (planar == PLANARCONFIG_SEPARATE) {
            for (std::uint16_t s = 0; s < spp; ++s) {
                for (std::uint32_t row = 0; row < h; ++row) {
                    if (TIFFReadScanline(tif.get(), buf.data(), row, s) < 0) {
                        throw IoError("scanline read failed in " + path);
                    }
                    for (std::uint32_t col = 0; col < w; ++col) {
                        img.bands[s](row, col) =
                            sample_to_float(buf.data(), col, img.source_type);
                    }
                }
            }
        } else {
            for (std::uint32_t row = 0; row < h; ++row) {
                if (TIFFReadScanline(tif.get(), buf.data(), row) < 0) {
                    throw IoError("scanline read failed in " + path);
                }
                for (std::uint32_t col = 0; col < w; ++col) {
                    for (std::uint16_t s = 0; s < spp; ++s) {
                        img.bands[s](row, col) = sample_to_float(
                            buf.data(), static_cast<size_t>(col) * spp + s, img.source_type);
                    }
                }
            }
        }
    }
    return img;
}

void write_u8(const std::string& path, const GridU8& grid, const GeoInfo& geo,
              std::optional<int> nodata_value) {
    if (grid.rows() <= 0 || grid.cols() <= 0) {
        throw DataError("refusing to write an empty raster");
    }
    GeoInfo geo_with_nodata = geo;
    if (nodata_value) {
        geo_with_nodata.nodata_text = std::to_string(*nodata_value);
    }
    TiffPtr tif = open_tiff(path, "w");
    setup_writer(tif.get(), grid.rows(), grid.cols(), 1, 8, SAMPLEFORMAT_UINT,
                 geo_with_nodata);
    for (Eigen::Index row = 0; row < grid.rows(); ++row) {
        // Row-major grid: a row is already one contiguous scanline.
        if (TIFFWriteScanline(tif.get(),
                              const_cast<std::uint8_t*>(grid.row(row).data()),
                              static_cast<std::uint32_t>(row)) < 0) {
            throw IoError("scanline write failed: " + path);
        }
    }
}

void write_f32(const std::string& path, const std::vector<GridF>& bands,
               const GeoInfo& geo, std::optional<std::string> nodata_text) {
    if (bands.empty() || bands.front().rows() <= 0 || bands.front().cols() <= 0) {
        throw DataError("refusing to write an empty raster");
    }
    const Eigen::Index h = bands.front().rows();
    const Eigen::Index w = bands.front().cols();
    for (const auto& b : bands) {
        if (b.rows() != h || b.cols() != w) {
            throw DataError("band dimensions mismatch on write: " + path);
        }
    }
    GeoInfo geo_with_nodata = geo;
    if (nodata_text) geo_with_nodata.nodata_text = *nodata_text;

    TiffPtr tif = open_tiff(path, "w");
    setup_writer(tif.get(), h, w, static_cast<int>(bands.size()), 32,
                 SAMPLEFORMAT_IEEEFP, geo_with_nodata);
    const size_t spp = bands.size();
    std::vector<float> line(static_cast<size_t>(w) * spp);
    for (Eigen::Index row = 0; row < h; ++row) {
        for (Eigen::Index col = 0; col < w; ++col) {
            for (size_t s = 0; s < spp; ++s) {
                line[static_cast<size_t>(col) * spp + s] = bands[s](row, col);
            }
        }
        if (TIFFWriteScanline(tif.get(), line.data(), static_cast<std::uint32_t>(row)) < 0) {
            throw IoError("scanline write failed: " + path);
        }
    }
}

}  // namespace coalmap::geotiff
