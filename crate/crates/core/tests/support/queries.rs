// The seven example queries, verbatim up to whitespace.
pub const QUERIES: [&str; 7] = [
    "SELECT TOP 30 id, distance
     FROM SIMSEARCH :queryImage IN image BY shape",
    "SELECT value
     FROM SIMSEARCH 'feather' IN keyword BY value
          DISTANCE FUNCTION weighted_edit_distance(1,2,2)
     WHERE distance <= 2",
    "SELECT *
     FROM SIMSEARCH
          IN keyword AS k1, keyword AS k2
          BY simple_edit_distance(k1.value, k2.value)
          METHOD MessifSimilarityJoin(1)",
    "SELECT TOP 1 title
     FROM SIMSEARCH
            extract_MPEG7_color_layout(:o1) AS co1,
            extract_MPEG7_color_layout(:o2) AS co2,
            extract_MPEG7_contour_shape(:o3) AS sh3
          IN image
          BY minimum(DISTANCE(co1, color), DISTANCE(co2, color),
            DISTANCE(sh3,shape))",
    "SELECT DISTINCT vf1.video_id
     FROM SIMSEARCH :ObamaFace IN video_frame AS vf1 BY face_descriptor
            METHOD rangeQuery(0.01)
          INNER JOIN
          SIMSEARCH :BushFace IN video_frame AS vf2 BY face_descriptor
            METHOD rangeQuery(0.01)
          ON (vf1.video_id = vf2.video_id)",
    "SELECT vf1.video_id
     FROM SIMSEARCH IN
            SIMSEARCH
              extract_MPEG7_color_layout(:VesuvImage) AS co,
              extract_MPEG7_contour_shape(:VesuvImage) AS sh
            IN video_frame AS vf1
              BY weight_sum((DISTANCE(shape,sh), 0.7),
                            (DISTANCE(color, co), 0.2))
              METHOD MessifRangeQuery(0.1,15000)
            NATURAL JOIN
            SIMSEARCH 'vulcano' IN video_frame AS vf2
              BY subtitles
              METHOD MessifRangeQuery(0.1,15000)
          BY DISTANCE(vf1.time_second, vf2.time_second)
          AS sim_frames
     WHERE sim_frames.distance <= 120",
    "SELECT value
     FROM keyword
     WHERE id IN (
        SELECT TOP 10 keyword_id, count(image_id) AS frequency
        FROM (
            SELECT TOP 30 id
            FROM SIMSEARCH :Image IN image
                 BY color DISTANCE
                 FUNCTION L1_metric
        ) AS simimage
        INNER JOIN image_keyword
            ON (simimage.id = image_keyword.image_id)
        GROUP BY keyword_id
        HAVING frequency > 3
        ORDER BY frequency DESC
     )",
];
