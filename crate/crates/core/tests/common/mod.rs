//! Independent reference implementations used by the integration tests.
//! None of these call into the code paths they check.

#![allow(dead_code)]

use lesionmask::{BinaryMask, GrayImage, RgbImage};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exhaustive Otsu: evaluates w0 * w1 * (mu0 - mu1)^2 as an exact rational
/// at every cut 0..=254 and returns the smallest maximizer. `None` if no cut
/// separates two non-empty classes.
pub fn otsu_oracle(counts: &[u64; 256]) -> Option<u8> {
    let big = |v: u64| BigRational::from_integer(v.into());
    let total: u64 = counts.iter().sum();
    let mut best: Option<(u8, BigRational)> = None;
    for t in 0..=254usize {
        let n0: u64 = counts[..=t].iter().sum();
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s0: u64 = counts[..=t].iter().enumerate().map(|(v, &c)| v as u64 * c).sum();
        let s1: u64 = counts[t + 1..].iter().enumerate().map(|(v, &c)| (v + t + 1) as u64 * c).sum();
        let w0 = big(n0) / big(total);
        let w1 = big(n1) / big(total);
        let mu0 = big(s0) / big(n0);
        let mu1 = big(s1) / big(n1);
        let diff = mu0 - mu1;
        let objective = w0 * w1 * diff.clone() * diff;
        if best.as_ref().is_none_or(|(_, b)| objective > *b) {
            best = Some((t as u8, objective));
        }
    }
    best.map(|(t, _)| t)
}

pub fn tally(pixels: &[u8]) -> [u64; 256] {
    std::array::from_fn(|v| pixels.iter().filter(|&&p| usize::from(p) == v).count() as u64)
}

/// Neighbourhood offsets of a square with anchor side/2.
fn square_offsets(side: usize) -> Vec<(isize, isize)> {
    let a = (side / 2) as isize;
    let mut v = Vec::new();
    for dy in 0..side as isize {
        for dx in 0..side as isize {
            v.push((dx - a, dy - a));
        }
    }
    v
}

fn naive(mask: &BinaryMask, offsets: &[(isize, isize)], any: bool) -> BinaryMask {
    let (w, h) = mask.dimensions();
    if offsets.is_empty() {
        return mask.clone();
    }
    BinaryMask::from_fn(w, h, |x, y| {
        let mut hits = offsets.iter().map(|&(dx, dy)| {
            let (sx, sy) = (x as isize + dx, y as isize + dy);
            if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                // outside: background for dilation, foreground for erosion
                !any
            } else {
                mask.get(sx as usize, sy as usize)
            }
        });
        if any {
            hits.any(|b| b)
        } else {
            hits.all(|b| b)
        }
    })
}

pub fn naive_dilate(mask: &BinaryMask, side: usize) -> BinaryMask {
    naive(mask, &square_offsets(side), true)
}

pub fn naive_erode(mask: &BinaryMask, side: usize) -> BinaryMask {
    naive(mask, &square_offsets(side), false)
}

/// Opening as the union of every side x side square that fits inside the
/// mask and whose anchor cell lies in the image. Overhanging cells read as
/// foreground.
pub fn naive_open(mask: &BinaryMask, side: usize) -> BinaryMask {
    if side == 0 {
        return mask.clone();
    }
    let (w, h) = mask.dimensions();
    let s = side as isize;
    let a = (side / 2) as isize;
    let mut out = BinaryMask::empty(w, h);
    for oy in -a..h as isize - a {
        for ox in -a..w as isize - a {
            let fits = (0..s).all(|dy| {
                (0..s).all(|dx| {
                    let (x, y) = (ox + dx, oy + dy);
                    x < 0 || y < 0 || x >= w as isize || y >= h as isize || mask.get(x as usize, y as usize)
                })
            });
            if fits {
                for dy in 0..s {
                    for dx in 0..s {
                        let (x, y) = (ox + dx, oy + dy);
                        if x >= 0 && y >= 0 && x < w as isize && y < h as isize {
                            out.set(x as usize, y as usize, true);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn random_mask(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density))
}

pub fn random_gray(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.random()).expect("valid dims")
}

pub fn random_rgb(rng: &mut impl Rng, w: usize, h: usize) -> RgbImage {
    RgbImage::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
        .expect("valid dims")
}

/// Mirror index without repeating the edge sample.
fn reflect101(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    if n == 1 {
        return 0;
    }
    while i < 0 || i >= n {
        if i < 0 {
            i = -i;
        }
        if i >= n {
            i = 2 * (n - 1) - i;
        }
    }
    i as usize
}

pub fn kernel_1d(sigma: f64, side: usize) -> Vec<f64> {
    let r = (side / 2) as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Direct 2-D convolution with the outer-product kernel and reflected borders.
pub fn brute_blur(img: &GrayImage, sigma: f64, side: usize) -> Vec<f64> {
    let k = kernel_1d(sigma, side);
    let r = (side / 2) as isize;
    let (w, h) = img.dimensions();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = reflect101(x as isize + dx, w);
                    let sy = reflect101(y as isize + dy, h);
                    acc += k[(dx + r) as usize] * k[(dy + r) as usize] * f64::from(img.get(sx, sy));
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

pub fn disk(w: usize, h: usize, cx: f64, cy: f64, radius: f64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        dx * dx + dy * dy <= radius * radius
    })
}

/// Dark disk on a light background with additive Gaussian noise (sigma
/// 0 disables noise). Returns the RGB image and the true disk.
pub fn disk_image(size: usize, radius: f64, inside: f64, outside: f64, noise: f64, seed: u64) -> (RgbImage, BinaryMask) {
    let c = (size as f64 - 1.0) / 2.0;
    let truth = disk(size, size, c, c, radius);
    let mut r = rng(seed);
    let normal = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).unwrap();
    let img = RgbImage::from_fn(size, size, |x, y| {
        let base = if truth.get(x, y) { inside } else { outside };
        let n = if noise > 0.0 { normal.sample(&mut r) } else { 0.0 };
        let v = (base + n).round().clamp(0.0, 255.0) as u8;
        [v, v, v]
    })
    .unwrap();
    (img, truth)
}

/// 2|A n B| / (|A| + |B|) by direct set counting.
pub fn dice_oracle(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let inter = a.bits().iter().zip(b.bits()).filter(|(x, y)| **x && **y).count();
    let sa = a.bits().iter().filter(|x| **x).count();
    let sb = b.bits().iter().filter(|x| **x).count();
    2.0 * inter as f64 / (sa + sb) as f64
}

/// Writes `images/<id>.png` (a noisy dark disk per item) and a HAM-style
/// `metadata.csv` under `root`. Returns (metadata path, image dir).
pub fn write_fixture(root: &std::path::Path, items: &[(&str, &str)]) -> (std::path::PathBuf, std::path::PathBuf) {
    write_fixture_sized(root, items, 40, 6.0)
}

/// As [`write_fixture`] with `size` x `size` images and disks of radius
/// `radius + index`.
pub fn write_fixture_sized(
    root: &std::path::Path,
    items: &[(&str, &str)],
    size: usize,
    radius: f64,
) -> (std::path::PathBuf, std::path::PathBuf) {
    let images = root.join("images");
    std::fs::create_dir_all(&images).unwrap();
    let mut csv = String::from("lesion_id,image_id,dx,dx_type,age,sex,localization\n");
    for (i, (id, dx)) in items.iter().enumerate() {
        let (img, _) = disk_image(size, radius + i as f64, 50.0, 190.0, 8.0, i as u64);
        img.save_png(images.join(format!("{id}.png"))).unwrap();
        csv.push_str(&format!("HAM_{i:07},{id},{dx},histo,50.0,female,back\n"));
    }
    let meta = root.join("metadata.csv");
    std::fs::write(&meta, csv).unwrap();
    (meta, images)
}

/// All regular files under `dir`, relative, sorted, with contents.
pub fn snapshot(dir: &std::path::Path) -> Vec<(std::path::PathBuf, Vec<u8>)> {
    fn walk(base: &std::path::Path, dir: &std::path::Path, out: &mut Vec<(std::path::PathBuf, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(base, &path, out);
            } else {
                out.push((path.strip_prefix(base).unwrap().to_path_buf(), std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}
