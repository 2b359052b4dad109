; Outer counter up to 4 with a scratch value chosen in each round, then a
; terminal phase.
(system
  (vars (pc Int) (i Int) (j Int) (done Int))
  (init (and (= pc 0) (= i 0) (= j 0) (= done 0)))
  (trans
    (rule (and (= pc 0) (< i 4)) ((i (+ i 1)) (pc 1)))
    (rule (and (= pc 0) (>= i 4)) ((pc 2)))
    (rule (= pc 1) ((j *) (pc 3)))
    (rule (and (= pc 3) (>= j 0) (<= j i)) ((pc 0)))
    (rule (and (= pc 3) (or (< j 0) (> j i))) ((j 0) (pc 0)))
    (rule (= pc 2) ((done 1) (pc 4)))
    (rule (= pc 4) ())))
