//! Built-in part dictionary: LDraw part numbers to box extents.

/// (part number, description, width x, depth z, height y) in LDU.
const PARTS: &[(&str, &str, i64, i64, i64)] = &[
    ("3005", "Brick 1 x 1", 20, 20, 24),
    ("3004", "Brick 1 x 2", 40, 20, 24),
    ("3622", "Brick 1 x 3", 60, 20, 24),
    ("3010", "Brick 1 x 4", 80, 20, 24),
    ("3009", "Brick 1 x 6", 120, 20, 24),
    ("3008", "Brick 1 x 8", 160, 20, 24),
    ("3003", "Brick 2 x 2", 40, 40, 24),
    ("3002", "Brick 2 x 3", 60, 40, 24),
    ("3001", "Brick 2 x 4", 80, 40, 24),
    ("2456", "Brick 2 x 6", 120, 40, 24),
    ("3007", "Brick 2 x 8", 160, 40, 24),
    ("3024", "Plate 1 x 1", 20, 20, 8),
    ("3023", "Plate 1 x 2", 40, 20, 8),
    ("3623", "Plate 1 x 3", 60, 20, 8),
    ("3710", "Plate 1 x 4", 80, 20, 8),
    ("3022", "Plate 2 x 2", 40, 40, 8),
    ("3021", "Plate 2 x 3", 60, 40, 8),
    ("3020", "Plate 2 x 4", 80, 40, 8),
    ("3795", "Plate 2 x 6", 120, 40, 8),
    ("3034", "Plate 2 x 8", 160, 40, 8),
    ("3031", "Plate 4 x 4", 80, 80, 8),
    ("3068b", "Tile 2 x 2", 40, 40, 8),
    ("3070b", "Tile 1 x 1", 20, 20, 8),
];

/// Normalize a shape reference: strip a `.dat` suffix and lowercase.
pub fn canonical_id(raw: &str) -> String {
    let lower = raw.trim().to_ascii_lowercase().replace('\\', "/");
    lower.strip_suffix(".dat").unwrap_or(&lower).to_string()
}

/// Extent `(width, depth, height)` for a known shape id.
pub fn lookup(id: &str) -> Option<[i64; 3]> {
    let id = canonical_id(id);
    PARTS
        .iter()
        .find(|(n, ..)| *n == id)
        .map(|&(_, _, w, d, h)| [w, d, h])
}

pub fn description(id: &str) -> Option<&'static str> {
    let id = canonical_id(id);
    PARTS.iter().find(|(n, ..)| *n == id).map(|(_, d, ..)| *d)
}

pub fn known_ids() -> impl Iterator<Item = &'static str> {
    PARTS.iter().map(|(n, ..)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extents_are_even_so_half_extents_stay_integral() {
        for (n, _, w, d, h) in PARTS {
            assert!(w % 2 == 0 && d % 2 == 0 && h % 2 == 0, "{n}");
        }
    }

    #[test]
    fn lookup_accepts_ldraw_file_names() {
        assert_eq!(lookup("3001.DAT"), Some([80, 40, 24]));
        assert_eq!(lookup("3005"), Some([20, 20, 24]));
        assert_eq!(lookup("99999"), None);
        assert_eq!(description("3024.dat"), Some("Plate 1 x 1"));
    }
}
