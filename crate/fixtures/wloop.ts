; Work-item loop: the first inner loop produces items while w <= 5, the
; second consumes them while w > 2. pc holds the location number.
(system
  (vars (w Int) (pc Int))
  (init (= pc 1))
  (trans
    (rule (= pc 1) ((pc 2)))
    (rule (= pc 2) ((pc 3)))
    (rule (and (= pc 3) (<= w 5)) ((pc 4)))
    (rule (and (= pc 3) (> w 5)) ((pc 5)))
    (rule (= pc 4) ((pc 5)))
    (rule (= pc 4) ((pc 7)))
    (rule (= pc 5) ((pc 6) (w (+ w 1))))
    (rule (= pc 6) ((pc 3)))
    (rule (= pc 7) ((pc 8)))
    (rule (and (= pc 8) (<= w 2)) ((pc 11)))
    (rule (and (= pc 8) (> w 2)) ((pc 9)))
    (rule (= pc 9) ((pc 10) (w (- w 1))))
    (rule (= pc 10) ((pc 8)))
    (rule (= pc 11) ((pc 3)))))
