"""
Data ingestion and generation: file formats (:mod:`voronoicur.analysis.files`)
and seeded test matrices and sketches (:mod:`voronoicur.analysis.generators`).
"""
