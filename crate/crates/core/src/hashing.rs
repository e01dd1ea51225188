use sha2::{Digest, Sha256};

/// Incremental content hasher producing short hex ids.
pub(crate) struct ContentHasher(Sha256);

impl ContentHasher {
    pub(crate) fn new(domain: &str) -> Self {
        let mut h = Sha256::new();
        h.update(domain.as_bytes());
        h.update([0u8]);
        ContentHasher(h)
    }

    pub(crate) fn str(&mut self, s: &str) -> &mut Self {
        self.0.update((s.len() as u64).to_le_bytes());
        self.0.update(s.as_bytes());
        self
    }

    pub(crate) fn u64(&mut self, v: u64) -> &mut Self {
        self.0.update(v.to_le_bytes());
        self
    }

    pub(crate) fn f64(&mut self, v: f64) -> &mut Self {
        self.0.update(v.to_bits().to_le_bytes());
        self
    }

    pub(crate) fn f64s(&mut self, vs: &[f64]) -> &mut Self {
        self.u64(vs.len() as u64);
        for v in vs {
            self.f64(*v);
        }
        self
    }

    /// First 16 hex characters of the digest.
    pub(crate) fn finish(&mut self) -> String {
        let digest = std::mem::take(&mut self.0).finalize();
        hex::encode(&digest[..8])
    }
}
