//! Image file I/O: PNG through the `image` crate, binary PPM (P6)
//! hand-rolled. Only lossless formats are accepted for output because the
//! cipher is bit-exact.

use std::fs;
use std::path::Path;

use ils_core::ImageBuffer;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ImageFormat {
    Png,
    Ppm,
}

fn format_from_extension(path: &Path) -> Result<ImageFormat, CliError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => Ok(ImageFormat::Png),
        "ppm" => Ok(ImageFormat::Ppm),
        other => Err(CliError::Validation(format!(
            "unsupported image format {other:?} (lossless png or ppm required)"
        ))),
    }
}

pub fn load_rgb(path: &Path) -> Result<ImageBuffer, CliError> {
    let format = format_from_extension(path)
        .map_err(|_| CliError::Io(format!("cannot read {}: unsupported format", path.display())))?;
    match format {
        ImageFormat::Png => {
            let img = image::open(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?
                .to_rgb8();
            let (w, h) = (img.width() as usize, img.height() as usize);
            ImageBuffer::new(h, w, img.into_raw())
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
        }
        ImageFormat::Ppm => {
            let bytes = fs::read(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            parse_ppm(&bytes)
                .map_err(|reason| CliError::Io(format!("cannot read {}: {reason}", path.display())))
        }
    }
}

pub fn save_rgb(
    path: &Path,
    img: &ImageBuffer,
    forced: Option<ImageFormat>,
) -> Result<(), CliError> {
    let format = match forced {
        Some(f) => f,
        None => format_from_extension(path)?,
    };
    match format {
        ImageFormat::Png => image::save_buffer(
            path,
            img.samples(),
            img.width() as u32,
            img.height() as u32,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        ImageFormat::Ppm => {
            let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
            out.extend_from_slice(img.samples());
            fs::write(path, out)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn parse_ppm(bytes: &[u8]) -> Result<ImageBuffer, String> {
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String, String> {
        // skip whitespace and '#' comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token(bytes)?;
    if magic != "P6" {
        return Err(format!("not a binary PPM (magic {magic:?})"));
    }
    let width: usize = token(bytes)?.parse().map_err(|_| "bad width".to_string())?;
    let height: usize = token(bytes)?.parse().map_err(|_| "bad height".to_string())?;
    let maxval: usize = token(bytes)?.parse().map_err(|_| "bad maxval".to_string())?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval} (8-bit required)"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let expected = 3 * width * height;
    if bytes.len() < pos + expected {
        return Err("truncated pixel data".into());
    }
    ImageBuffer::new(height, width, bytes[pos..pos + expected].to_vec()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_round_trip() {
        let img = ImageBuffer::from_fn(3, 5, |r, c| [r as u8, c as u8, 200]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.ppm");
        save_rgb(&path, &img, None).unwrap();
        assert_eq!(load_rgb(&path).unwrap(), img);
    }

    #[test]
    fn ppm_with_comment() {
        let data = b"P6\n# a comment\n2 1\n255\n\x01\x02\x03\x04\x05\x06";
        let img = parse_ppm(data).unwrap();
        assert_eq!(img.width(), 2);
        assert_eq!(img.samples(), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn lossy_output_rejected() {
        let img = ImageBuffer::new(1, 1, vec![0, 0, 0]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let err = save_rgb(&dir.path().join("x.jpg"), &img, None).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
    }
}
